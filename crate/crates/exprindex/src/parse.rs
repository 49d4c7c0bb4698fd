//! Expression parser.
//!
//! Grammar (whitespace insignificant between tokens):
//!
//! ```text
//! Expr ::= Var | Sym | Sym "(" Expr ("," Expr)* ")"
//! Var  ::= [A-Z_][A-Za-z0-9_]*
//! Sym  ::= [a-z0-9][A-Za-z0-9_]*
//! ```
//!
//! The parser appends the prefix-notation encoding to an arena. Variable
//! names only matter during the parse: the first occurrence of each name
//! becomes an unbound `Novar` cell, every later occurrence an `Ofvar` cell
//! with the backward distance to it, and the names are then discarded.

use std::collections::HashMap;

use crate::arena::{Arena, Cell, ExprRef};
use crate::symbol::Symbol;

/// Syntax error with the byte position it occurred at.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at column {}: {msg}", pos + 1)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    cells: Vec<Cell>,
    vars: HashMap<&'a str, usize>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_')
        {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b) if b.is_ascii_uppercase() || b == b'_' => {
                let name = self.ident();
                let here = self.cells.len();
                match self.vars.get(name) {
                    Some(&base) => self.cells.push(Cell::Ofvar {
                        back_offset: (here - base) as u32,
                    }),
                    None => {
                        self.vars.insert(name, here);
                        self.cells.push(Cell::Novar { binding: None });
                    }
                }
                Ok(())
            }
            Some(b) if b.is_ascii_lowercase() || b.is_ascii_digit() => {
                let name = self.ident();
                let symbol = Symbol::intern(name);
                let cons_at = self.cells.len();
                self.cells.push(Cell::Cons { symbol, arity: 0 });
                self.skip_ws();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    self.skip_ws();
                    if self.peek() == Some(b')') {
                        return self.err(
                            self.pos,
                            format!("`{name}()` is not allowed: a nullary constructor takes no parentheses"),
                        );
                    }
                    let mut arity = 0u32;
                    loop {
                        self.expr()?;
                        arity += 1;
                        self.skip_ws();
                        match self.peek() {
                            Some(b',') => {
                                self.pos += 1;
                            }
                            Some(b')') => {
                                self.pos += 1;
                                break;
                            }
                            Some(_) => {
                                return self.err(self.pos, "expected `,` or `)`");
                            }
                            None => {
                                return self.err(self.pos, "unclosed argument list");
                            }
                        }
                    }
                    self.cells[cons_at] = Cell::Cons { symbol, arity };
                }
                Ok(())
            }
            Some(_) => self.err(self.pos, "expected an expression"),
            None => self.err(self.pos, "unexpected end of input"),
        }
    }
}

/// Parses `text` and appends its encoding to `arena`.
///
/// On error the arena is left untouched.
pub fn parse(text: &str, arena: &mut Arena) -> Result<ExprRef, ParseError> {
    let mut p = Parser {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
        cells: Vec::new(),
        vars: HashMap::new(),
    };
    p.skip_ws();
    if p.peek().is_none() {
        return p.err(0, "empty input");
    }
    p.expr()?;
    p.skip_ws();
    if p.peek().is_some() {
        return p.err(p.pos, "unexpected trailing input");
    }
    Ok(arena.append(p.cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::CellTag;

    fn tags(arena: &Arena, e: ExprRef) -> Vec<CellTag> {
        (0..arena.span(e) as u32)
            .map(|i| arena.cell_type(e.cell(i)))
            .collect()
    }

    #[test]
    fn layout_of_running_example() {
        // f(a, V1, g(b), V2, V2) encodes to seven cells ending in an offset
        // variable one cell behind its base.
        let mut a = Arena::new();
        let e = parse("f(a, V1, g(b), V2, V2)", &mut a).unwrap();
        use CellTag::*;
        assert_eq!(tags(&a, e), vec![Cons, Cons, Novar, Cons, Cons, Novar, Ofvar]);
        assert_eq!(a.cell(e.cell(6)), Cell::Ofvar { back_offset: 1 });
        match a.cell(e.cell(0)) {
            Cell::Cons { symbol, arity } => {
                assert_eq!((symbol.name(), arity), ("f", 5));
            }
            c => panic!("unexpected head {c:?}"),
        }
    }

    #[test]
    fn nullary_and_shared_variable() {
        let mut a = Arena::new();
        let e = parse("a", &mut a).unwrap();
        assert_eq!(a.span(e), 1);

        let e = parse("f(V1, V1)", &mut a).unwrap();
        use CellTag::*;
        assert_eq!(tags(&a, e), vec![Cons, Novar, Ofvar]);
        assert_eq!(a.cell(e.cell(2)), Cell::Ofvar { back_offset: 1 });
    }

    #[test]
    fn distinct_parses_share_no_cells() {
        let mut a = Arena::new();
        let e1 = parse("f(V1)", &mut a).unwrap();
        let e2 = parse("f(V1)", &mut a).unwrap();
        assert_ne!(e1.cell(1), e2.cell(1));
    }

    #[test]
    fn variables_can_be_bare_underscore_and_digits_start_symbols() {
        let mut a = Arena::new();
        let e = parse("f(_, 42, _)", &mut a).unwrap();
        use CellTag::*;
        assert_eq!(tags(&a, e), vec![Cons, Novar, Cons, Ofvar]);
    }

    #[test]
    fn error_positions() {
        let mut a = Arena::new();
        let before = a.len();

        let e = parse("", &mut a).unwrap_err();
        assert_eq!(e.pos, 0);

        let e = parse("f(", &mut a).unwrap_err();
        assert_eq!(e.pos, 2);

        let e = parse("f()", &mut a).unwrap_err();
        assert!(e.msg.contains("not allowed"));

        let e = parse("f(a,)", &mut a).unwrap_err();
        assert_eq!(e.pos, 4);

        let e = parse("f(a) b", &mut a).unwrap_err();
        assert!(e.msg.contains("trailing"));
        assert_eq!(e.pos, 5);

        let e = parse("f(a ,, b)", &mut a).unwrap_err();
        assert_eq!(e.pos, 5);

        // Failed parses leave no cells behind.
        assert_eq!(a.len(), before);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let mut a = Arena::new();
        let e1 = parse("f(a,V1,g(b),V2,V2)", &mut a).unwrap();
        let e2 = parse("  f ( a , V1 , g( b ) , V2 , V2 )  ", &mut a).unwrap();
        let s1 = a.span(e1);
        let s2 = a.span(e2);
        assert_eq!(s1, s2);
        for i in 0..s1 as u32 {
            assert_eq!(a.cell(e1.cell(i)), a.cell(e2.cell(i)));
        }
    }
}
