//! The `pm-automaton v1` text format.
//!
//! ```text
//! pm-automaton v1
//! structure: pm
//! states: 2
//! initial: 1
//!
//! state 1:
//! A + 1
//! B - 2
//! ...
//! ```
//!
//! Every state lists all observables in structure order with the output
//! sign and the (1-based) next state. Blank lines are ignored and `#` starts
//! a comment.

use std::fmt::Write as _;

use super::MealyAutomaton;
use crate::error::{Error, Result};
use crate::observables::{Sign, StructureKind};

const MAGIC: &str = "pm-automaton v1";

pub fn serialize(a: &MealyAutomaton) -> String {
    let s = a.structure();
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "structure: {}", a.kind().name()).unwrap();
    writeln!(out, "states: {}", a.num_states()).unwrap();
    writeln!(out, "initial: {}", a.initial() + 1).unwrap();
    for q in 0..a.num_states() {
        writeln!(out).unwrap();
        writeln!(out, "state {}:", q + 1).unwrap();
        for x in 0..s.len() {
            writeln!(out, "{} {} {}", s.label(x), a.value(q, x), a.next(q, x) + 1).unwrap();
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap().trim();
            self.last = i + 1;
            if !line.is_empty() {
                return Ok((i + 1, line));
            }
        }
        Err(Error::Syntax { line: self.last + 1, message: "unexpected end of input".into() })
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (line, text) = self.next_line()?;
        let value = text
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(':'))
            .ok_or_else(|| Error::Syntax { line, message: format!("expected `{key}: ...`") })?;
        Ok((line, value.trim()))
    }
}

fn number(line: usize, text: &str, what: &str) -> Result<usize> {
    text.parse::<usize>().map_err(|_| Error::Syntax { line, message: format!("invalid {what} `{text}`") })
}

pub fn parse(text: &str) -> Result<MealyAutomaton> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (line, magic) = lines.next_line()?;
    if magic != MAGIC {
        return Err(Error::Syntax { line, message: format!("expected `{MAGIC}`") });
    }
    let (line, name) = lines.field("structure")?;
    let kind: StructureKind = name.parse().map_err(|e: Error| Error::Syntax { line, message: e.to_string() })?;
    let s = kind.structure();
    let (line, k) = lines.field("states")?;
    let k = number(line, k, "state count")?;
    if k == 0 {
        return Err(Error::Syntax { line, message: "at least one state is required".into() });
    }
    let (line, initial) = lines.field("initial")?;
    let initial = number(line, initial, "initial state")?;
    if initial == 0 || initial > k {
        return Err(Error::Invariant(format!("initial state {initial} out of range 1..={k}")));
    }
    let mut values = Vec::with_capacity(k * s.len());
    let mut next = Vec::with_capacity(k * s.len());
    for q in 1..=k {
        let (line, header) = lines.next_line()?;
        let expected = format!("state {q}:");
        if header != expected {
            return Err(Error::Syntax { line, message: format!("expected `{expected}`") });
        }
        for x in 0..s.len() {
            let (line, entry) = lines.next_line()?;
            let parts: Vec<&str> = entry.split_whitespace().collect();
            let [label, sign, target] = parts[..] else {
                return Err(Error::Syntax { line, message: "expected `<label> <+|-> <next>`".into() });
            };
            if s.id_of(label) != Some(x) {
                return Err(Error::Syntax {
                    line,
                    message: format!("expected observable `{}`, found `{label}`", s.label(x)),
                });
            }
            let sign = match sign {
                "+" => Sign::Plus,
                "-" => Sign::Minus,
                other => return Err(Error::Syntax { line, message: format!("invalid outcome `{other}`") }),
            };
            let target = number(line, target, "next state")?;
            if target == 0 || target > k {
                return Err(Error::Invariant(format!(
                    "line {line}: state {q} observable {label}: next state {target} out of range 1..={k}"
                )));
            }
            values.push(sign);
            next.push(target - 1);
        }
    }
    if let Ok((line, extra)) = lines.next_line() {
        return Err(Error::Syntax { line, message: format!("unexpected trailing content `{extra}`") });
    }
    MealyAutomaton::new(kind, values, next, initial - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{a3, a4, build_ten_state};

    #[test]
    fn round_trips() {
        for a in [a3(), a4(), build_ten_state().unwrap().automaton] {
            let text = serialize(&a);
            let b = parse(&text).unwrap();
            assert_eq!(a, b);
            assert_eq!(serialize(&b), text);
        }
    }

    #[test]
    fn canonical_text_shape() {
        let text = serialize(&a3());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("pm-automaton v1"));
        assert_eq!(lines.next(), Some("structure: pm"));
        assert_eq!(lines.next(), Some("states: 3"));
        assert_eq!(lines.next(), Some("initial: 1"));
        assert!(text.contains("state 2:\nA + 2\nB + 1\nC + 2\n"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = serialize(&a3()).replace("state 1:", "# leading comment\n\nstate 1:   # first");
        assert_eq!(parse(&text).unwrap(), a3());
    }

    #[test]
    fn target_out_of_range() {
        let text = serialize(&a3()).replace("C + 2", "C + 5");
        assert!(matches!(parse(&text), Err(Error::Invariant(m)) if m.contains("next state 5")));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = serialize(&a3()).replace("B + 1", "B * 1");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 8, .. }), "{err}");
        assert!(matches!(parse("pm-automaton v2"), Err(Error::Syntax { line: 1, .. })));
        let text = serialize(&a3()).replace("a + 3", "b + 3");
        assert!(matches!(parse(&text), Err(Error::Syntax { .. })));
        let truncated: String = serialize(&a3()).lines().take(12).map(|l| format!("{l}\n")).collect();
        assert!(parse(&truncated).is_err());
    }
}
