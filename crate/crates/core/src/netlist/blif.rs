// SPDX-License-Identifier: Apache-2.0

//! The combinational BLIF subset: `.model`, `.inputs`, `.outputs`, `.names`
//! with on-set cover rows, and `.end`. `#` starts a comment and a trailing
//! `\` continues a line.

use std::fmt::Write;

use super::{Cover, Cube, Netlist, NetlistBuilder, NodeFunction};
use crate::error::{Error, Result};

/// A logical line after comment stripping and continuation joining,
/// tagged with the physical line it started on.
struct Line {
    number: usize,
    tokens: Vec<String>,
}

fn logical_lines(text: &str) -> Vec<Line> {
    let mut out = Vec::new();
    let mut pending: Option<Line> = None;
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let (body, continued) = match body.trim_end().strip_suffix('\\') {
            Some(b) => (b, true),
            None => (body, false),
        };
        let line = pending.get_or_insert_with(|| Line {
            number: i + 1,
            tokens: Vec::new(),
        });
        line.tokens.extend(body.split_whitespace().map(str::to_string));
        if !continued {
            let line = pending.take().expect("pending line");
            if !line.tokens.is_empty() {
                out.push(line);
            }
        }
    }
    if let Some(line) = pending.filter(|l| !l.tokens.is_empty()) {
        out.push(line);
    }
    out
}

struct PendingCover {
    fanin: Vec<String>,
    output: String,
    cubes: Vec<Cube>,
}

/// Parses and validates a BLIF model.
pub fn parse_blif(text: &str) -> Result<Netlist> {
    let mut name: Option<String> = None;
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut covers: Vec<PendingCover> = Vec::new();
    let mut in_names = false;
    let mut ended = false;

    for line in logical_lines(text) {
        let n = line.number;
        let head = line.tokens[0].as_str();
        if ended {
            return Err(Error::syntax(n, "content after .end"));
        }
        if head.starts_with('.') {
            in_names = false;
            let args = &line.tokens[1..];
            match head {
                ".model" => {
                    if name.is_some() {
                        return Err(Error::syntax(n, "only one .model is supported"));
                    }
                    let [model] = args else {
                        return Err(Error::syntax(n, ".model takes exactly one name"));
                    };
                    name = Some(model.clone());
                }
                ".inputs" => inputs.extend(args.iter().cloned()),
                ".outputs" => outputs.extend(args.iter().cloned()),
                ".names" => {
                    let Some((out, fanin)) = args.split_last() else {
                        return Err(Error::syntax(n, ".names needs an output net"));
                    };
                    covers.push(PendingCover {
                        fanin: fanin.to_vec(),
                        output: out.clone(),
                        cubes: Vec::new(),
                    });
                    in_names = true;
                }
                ".end" => ended = true,
                ".latch" | ".mlatch" | ".clock" => {
                    return Err(Error::Sequential {
                        line: n,
                        construct: head.to_string(),
                    });
                }
                other => return Err(Error::syntax(n, format!("unsupported construct `{other}`"))),
            }
            continue;
        }
        if !in_names {
            return Err(Error::syntax(n, "cover row outside of .names"));
        }
        let cover = covers.last_mut().expect("inside .names");
        let width = cover.fanin.len();
        let (plane, value) = match (width, line.tokens.as_slice()) {
            (0, [v]) => ("", v.as_str()),
            (_, [p, v]) if width > 0 => (p.as_str(), v.as_str()),
            _ => return Err(Error::syntax(n, format!("expected a cover row for {width} inputs"))),
        };
        match value {
            "1" => {}
            "0" => return Err(Error::syntax(n, "off-set cover rows (output 0) are not supported")),
            v => return Err(Error::syntax(n, format!("invalid cover output `{v}`"))),
        }
        let cube = Cube::parse(plane)
            .filter(|c| c.width() == width)
            .ok_or_else(|| Error::syntax(n, format!("invalid cover plane `{plane}` for {width} inputs")))?;
        cover.cubes.push(cube);
    }

    let mut b = NetlistBuilder::new(name.unwrap_or_else(|| "top".to_string()));
    for i in &inputs {
        if b.has_net(i) {
            return Err(Error::DuplicateDriver(i.clone()));
        }
        b.input(i);
    }
    for c in covers {
        let fanin: Vec<_> = c.fanin.iter().map(|f| b.net(f)).collect();
        let out = b.net(&c.output);
        b.push_node(out, fanin, NodeFunction::Cover(Cover::new(c.fanin.len(), c.cubes)));
    }
    for o in &outputs {
        let id = b.net(o);
        b.output(id);
    }
    b.build()
}

/// Canonical BLIF text: nodes ordered by logic level then output name,
/// cover rows sorted. Primitive gates are written as their covers.
pub fn emit_blif(netlist: &Netlist) -> String {
    let mut s = String::new();
    let _ = writeln!(s, ".model {}", netlist.name());
    let _ = writeln!(s, ".inputs {}", netlist.input_names().join(" "));
    let _ = writeln!(s, ".outputs {}", netlist.output_names().join(" "));
    let levels = netlist.levels();
    let mut order: Vec<usize> = (0..netlist.nodes().len()).collect();
    order.sort_by(|&a, &b| {
        let na = netlist.net_name(netlist.nodes()[a].output);
        let nb = netlist.net_name(netlist.nodes()[b].output);
        levels[a].cmp(&levels[b]).then_with(|| na.cmp(nb))
    });
    for i in order {
        let node = &netlist.nodes()[i];
        let mut header = String::from(".names");
        for &f in &node.fanin {
            header.push(' ');
            header.push_str(netlist.net_name(f));
        }
        header.push(' ');
        header.push_str(netlist.net_name(node.output));
        let _ = writeln!(s, "{header}");
        for row in node.function.to_cover(node.fanin.len()).canonical() {
            if row.is_empty() {
                let _ = writeln!(s, "1");
            } else {
                let _ = writeln!(s, "{row} 1");
            }
        }
    }
    let _ = writeln!(s, ".end");
    s
}
