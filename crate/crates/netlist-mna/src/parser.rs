//! Netlist grammar, one statement per line:
//!
//! ```text
//! R<name> <n1> <n2> <ohms>
//! L<name> <n1> <n2> <henries>
//! C<name> <n1> <n2> <farads>
//! V<name> <n+> <n-> AC <volts> [<phase_rad>]
//! .ac <lin|log> <points> <w_start> <w_stop>
//! ```
//!
//! Lines starting with `*` or `#` are comments. Values accept the
//! engineering suffixes k, m, u, n, p. Node ids are non-negative
//! integers with 0 as ground.

use crate::NetlistError;
use sweep_analysis::Scale;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    R,
    L,
    C,
    Vsrc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub name: String,
    pub node_a: usize,
    pub node_b: usize,
    pub value: f64,
    /// radians; meaningful for sources only, 0 elsewhere
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepDirective {
    pub scale: Scale,
    pub points: usize,
    pub start: f64,
    pub stop: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub elements: Vec<Element>,
    pub sweep: SweepDirective,
}

/// (1-based char column, token) pairs
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut col = 0usize;
    let mut start: Option<(usize, usize)> = None;
    for (bi, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((c, b)) = start.take() {
                out.push((c, &line[b..bi]));
            }
        } else if start.is_none() {
            start = Some((col, bi));
        }
    }
    if let Some((c, b)) = start {
        out.push((c, &line[b..]));
    }
    out
}

fn parse_value(tok: &str) -> Option<f64> {
    if let Ok(v) = tok.parse::<f64>() {
        return Some(v);
    }
    let suffix = tok.chars().next_back()?;
    let mult = match suffix {
        'k' => 1e3,
        'm' => 1e-3,
        'u' => 1e-6,
        'n' => 1e-9,
        'p' => 1e-12,
        _ => return None,
    };
    let head = &tok[..tok.len() - suffix.len_utf8()];
    head.parse::<f64>().ok().map(|v| v * mult)
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn get<'a>(
    toks: &[(usize, &'a str)],
    i: usize,
    line: usize,
    what: &str,
) -> Result<(usize, &'a str), NetlistError> {
    toks.get(i).copied().ok_or_else(|| {
        let col = toks.last().map_or(1, |(c, t)| c + t.chars().count());
        syntax(line, col, format!("expected {what}"))
    })
}

fn parse_node(toks: &[(usize, &str)], i: usize, line: usize) -> Result<usize, NetlistError> {
    let (col, tok) = get(toks, i, line, "node id")?;
    tok.parse::<usize>()
        .map_err(|_| syntax(line, col, format!("expected node id, found `{tok}`")))
}

fn parse_num(
    toks: &[(usize, &str)],
    i: usize,
    line: usize,
    what: &str,
) -> Result<(usize, f64), NetlistError> {
    let (col, tok) = get(toks, i, line, what)?;
    parse_value(tok)
        .map(|v| (col, v))
        .ok_or_else(|| syntax(line, col, format!("expected {what}, found `{tok}`")))
}

pub fn parse_netlist(text: &str) -> Result<Netlist, NetlistError> {
    let mut elements: Vec<Element> = Vec::new();
    let mut sweep: Option<SweepDirective> = None;
    let mut source_line: Option<usize> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let head = raw.trim_start();
        if head.is_empty() || head.starts_with('*') || head.starts_with('#') {
            continue;
        }
        let toks = tokenize(raw);
        let (col0, t0) = toks[0];

        if t0 == ".ac" {
            if sweep.is_some() {
                return Err(syntax(line, col0, "duplicate .ac directive"));
            }
            let (scol, stok) = get(&toks, 1, line, "scale (lin or log)")?;
            let scale = match stok {
                "lin" => Scale::Lin,
                "log" => Scale::Log,
                _ => return Err(syntax(line, scol, format!("expected lin or log, found `{stok}`"))),
            };
            let (pcol, ptok) = get(&toks, 2, line, "point count")?;
            let points = ptok
                .parse::<usize>()
                .map_err(|_| syntax(line, pcol, format!("expected point count, found `{ptok}`")))?;
            if points == 0 {
                return Err(syntax(line, pcol, "point count must be >= 1"));
            }
            let (wcol, start) = parse_num(&toks, 3, line, "sweep start")?;
            if !(start > 0.0) {
                return Err(syntax(line, wcol, "sweep start must be > 0"));
            }
            let (vcol, stop) = parse_num(&toks, 4, line, "sweep stop")?;
            if points > 1 && !(stop > start) {
                return Err(syntax(line, vcol, "sweep stop must exceed start"));
            }
            if let Some((c, t)) = toks.get(5) {
                return Err(syntax(line, *c, format!("unexpected trailing token `{t}`")));
            }
            sweep = Some(SweepDirective {
                scale,
                points,
                start,
                stop,
            });
            continue;
        }

        let kind = match t0.chars().next().unwrap() {
            'R' => ElementKind::R,
            'L' => ElementKind::L,
            'C' => ElementKind::C,
            'V' => ElementKind::Vsrc,
            _ => {
                return Err(syntax(
                    line,
                    col0,
                    format!("unknown element kind `{t0}` (expected R, L, C, or V)"),
                ))
            }
        };
        let name = t0.to_string();
        if elements.iter().any(|e| e.name == name) {
            return Err(NetlistError::DuplicateName { line, name });
        }
        let node_a = parse_node(&toks, 1, line)?;
        let node_b = parse_node(&toks, 2, line)?;

        let (value, phase, last) = if kind == ElementKind::Vsrc {
            if let Some(first_line) = source_line {
                return Err(NetlistError::MultipleSources { line, first_line });
            }
            source_line = Some(line);
            let (acol, atok) = get(&toks, 3, line, "AC keyword")?;
            if atok != "AC" {
                return Err(syntax(line, acol, format!("expected AC, found `{atok}`")));
            }
            let (_, volts) = parse_num(&toks, 4, line, "source amplitude")?;
            let phase = if toks.len() > 5 {
                parse_num(&toks, 5, line, "source phase")?.1
            } else {
                0.0
            };
            (volts, phase, 4 + usize::from(toks.len() > 5))
        } else {
            let (_, v) = parse_num(&toks, 3, line, "element value")?;
            (v, 0.0, 3)
        };
        if let Some((c, t)) = toks.get(last + 1) {
            return Err(syntax(line, *c, format!("unexpected trailing token `{t}`")));
        }
        if !(value > 0.0) {
            return Err(NetlistError::NonPositiveValue { line, name, value });
        }
        elements.push(Element {
            kind,
            name,
            node_a,
            node_b,
            value,
            phase,
        });
    }

    let sweep = sweep.ok_or(NetlistError::MissingSweep)?;
    if source_line.is_none() {
        return Err(NetlistError::NoSource);
    }
    Ok(Netlist { elements, sweep })
}

/// Canonical text form; parses back to an identical Netlist.
pub fn serialize_netlist(nl: &Netlist) -> String {
    let mut out = String::new();
    for e in &nl.elements {
        if e.kind == ElementKind::Vsrc {
            out.push_str(&format!(
                "{} {} {} AC {} {}\n",
                e.name, e.node_a, e.node_b, e.value, e.phase
            ));
        } else {
            out.push_str(&format!("{} {} {} {}\n", e.name, e.node_a, e.node_b, e.value));
        }
    }
    let scale = match nl.sweep.scale {
        Scale::Lin => "lin",
        Scale::Log => "log",
    };
    out.push_str(&format!(
        ".ac {} {} {} {}\n",
        scale, nl.sweep.points, nl.sweep.start, nl.sweep.stop
    ));
    out
}
