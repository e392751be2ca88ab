use thiserror::Error;

use super::{Arith, Formula, Target};

/// Syntax or typing error, positioned at the 1-based character column of the
/// first offending character.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(column: usize, message: impl Into<String>) -> Self {
        Self {
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(usize),
    Number(f64),
    Ident(String),
    LParen,
    RParen,
    Semi,
    Plus,
    Minus,
    Lt,
    Gt,
    Amp,
    Pipe,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, column });
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut fractional = false;
            if i < chars.len() && chars[i] == '.' {
                if i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    fractional = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    return Err(ParseError::new(
                        i + 2,
                        "expected digits after decimal point",
                    ));
                }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if fractional {
                Tok::Number(text.parse().expect("lexed digits form a valid float"))
            } else {
                match text.parse::<usize>() {
                    Ok(n) => Tok::Int(n),
                    Err(_) => Tok::Number(text.parse().expect("lexed digits form a valid float")),
                }
            };
            out.push(Token { tok, column });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            return Err(ParseError::new(
                column,
                format!("unexpected character `{c}`"),
            ));
        }
    }
    out.push(Token {
        tok: Tok::End,
        column: chars.len() + 1,
    });
    Ok(out)
}

// Untyped tree produced by the precedence parser; typed in a second pass.
#[derive(Debug)]
enum Expr {
    Target(Target),
    Number(f64),
    Binary(BinOp, Box<Node>, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Lt,
    Gt,
    And,
    Or,
}

#[derive(Debug)]
struct Node {
    expr: Expr,
    column: usize,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        self.tokens
            .get(self.pos + offset)
            .map(|t| &t.tok)
            .unwrap_or(&Tok::End)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.peek().clone();
        if t.tok == want {
            Ok(self.bump())
        } else {
            Err(unexpected(&t, what))
        }
    }

    fn binary_level(
        &mut self,
        ops: &[(Tok, BinOp)],
        next: fn(&mut Self) -> Result<Node, ParseError>,
    ) -> Result<Node, ParseError> {
        let mut lhs = next(self)?;
        while let Some(&(_, op)) = ops.iter().find(|(t, _)| *t == self.peek().tok) {
            self.bump();
            let rhs = next(self)?;
            let column = lhs.column;
            lhs = Node {
                expr: Expr::Binary(op, Box::new(lhs), Box::new(rhs)),
                column,
            };
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Node, ParseError> {
        self.binary_level(&[(Tok::Pipe, BinOp::Or)], Self::conjunction)
    }

    fn conjunction(&mut self) -> Result<Node, ParseError> {
        self.binary_level(&[(Tok::Amp, BinOp::And)], Self::comparison)
    }

    fn comparison(&mut self) -> Result<Node, ParseError> {
        let lhs = self.additive()?;
        let op = match self.peek().tok {
            Tok::Lt => BinOp::Lt,
            Tok::Gt => BinOp::Gt,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        if matches!(self.peek().tok, Tok::Lt | Tok::Gt) {
            return Err(ParseError::new(
                self.peek().column,
                "comparisons cannot be chained",
            ));
        }
        let column = lhs.column;
        Ok(Node {
            expr: Expr::Binary(op, Box::new(lhs), Box::new(rhs)),
            column,
        })
    }

    fn additive(&mut self) -> Result<Node, ParseError> {
        self.binary_level(
            &[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)],
            Self::primary,
        )
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Node {
                    expr: Expr::Number(n as f64),
                    column: t.column,
                })
            }
            Tok::Number(v) => {
                self.bump();
                Ok(Node {
                    expr: Expr::Number(v),
                    column: t.column,
                })
            }
            Tok::LParen => {
                if matches!(self.peek_at(1), Tok::Int(_)) && *self.peek_at(2) == Tok::Semi {
                    self.target()
                } else {
                    self.bump();
                    let inner = self.disjunction()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Node {
                        expr: inner.expr,
                        column: t.column,
                    })
                }
            }
            _ => Err(unexpected(&t, "a region target, a number or `(`")),
        }
    }

    fn target(&mut self) -> Result<Node, ParseError> {
        let open = self.expect(Tok::LParen, "`(`")?;
        let region = match self.bump().tok {
            Tok::Int(n) => n,
            _ => unreachable!("caller checked for an integer"),
        };
        self.expect(Tok::Semi, "`;`")?;
        let t = self.peek().clone();
        let condition = match t.tok {
            Tok::Ident(name) => {
                self.bump();
                name
            }
            _ => return Err(unexpected(&t, "a condition name")),
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(Node {
            expr: Expr::Target(Target { region, condition }),
            column: open.column,
        })
    }
}

fn unexpected(t: &Token, what: &str) -> ParseError {
    let found = match &t.tok {
        Tok::End => "end of input".to_string(),
        other => format!("{other:?}"),
    };
    ParseError::new(t.column, format!("expected {what}, found {found}"))
}

fn to_formula(node: Node) -> Result<Formula, ParseError> {
    match node.expr {
        Expr::Binary(BinOp::Lt, a, b) => Ok(Formula::Less(to_arith(*a)?, to_arith(*b)?)),
        Expr::Binary(BinOp::Gt, a, b) => Ok(Formula::Greater(to_arith(*a)?, to_arith(*b)?)),
        Expr::Binary(BinOp::And, a, b) => Ok(Formula::And(
            Box::new(to_formula(*a)?),
            Box::new(to_formula(*b)?),
        )),
        Expr::Binary(BinOp::Or, a, b) => Ok(Formula::Or(
            Box::new(to_formula(*a)?),
            Box::new(to_formula(*b)?),
        )),
        _ => Err(ParseError::new(
            node.column,
            "expected a comparison, found an arithmetic expression",
        )),
    }
}

fn to_arith(node: Node) -> Result<Arith, ParseError> {
    match node.expr {
        Expr::Target(t) => Ok(Arith::Target(t)),
        Expr::Number(v) => Ok(Arith::Literal(v)),
        Expr::Binary(BinOp::Add, a, b) => {
            Ok(Arith::Add(Box::new(to_arith(*a)?), Box::new(to_arith(*b)?)))
        }
        Expr::Binary(BinOp::Sub, a, b) => {
            Ok(Arith::Sub(Box::new(to_arith(*a)?), Box::new(to_arith(*b)?)))
        }
        _ => Err(ParseError::new(
            node.column,
            "expected an arithmetic expression, found a comparison or connective",
        )),
    }
}

/// Parses a prediction formula.
pub fn parse_prediction(source: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: lex(source)?,
        pos: 0,
    };
    let node = parser.disjunction()?;
    let rest = parser.peek();
    if rest.tok != Tok::End {
        return Err(unexpected(rest, "end of input"));
    }
    to_formula(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(src: &str) -> usize {
        parse_prediction(src).unwrap_err().column
    }

    #[test]
    fn simple_comparison() {
        assert_eq!(
            parse_prediction("(2;match) < (2;mismatch)").unwrap(),
            Formula::Less(Arith::target(2, "match"), Arith::target(2, "mismatch"))
        );
    }

    #[test]
    fn difference_of_differences() {
        let ast =
            parse_prediction("((2;light_np)-(2;heavy_np)) > ((2;heavy_vp)-(2;light_vp))").unwrap();
        assert_eq!(
            ast,
            Formula::Greater(
                Arith::Sub(
                    Box::new(Arith::target(2, "light_np")),
                    Box::new(Arith::target(2, "heavy_np"))
                ),
                Arith::Sub(
                    Box::new(Arith::target(2, "heavy_vp")),
                    Box::new(Arith::target(2, "light_vp"))
                ),
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let ast = parse_prediction("(1;a) - (1;b) + (1;c) < 2 | (1;a) > 1 & (1;b) > 1").unwrap();
        let lhs = Arith::Add(
            Box::new(Arith::Sub(
                Box::new(Arith::target(1, "a")),
                Box::new(Arith::target(1, "b")),
            )),
            Box::new(Arith::target(1, "c")),
        );
        assert_eq!(
            ast,
            Formula::Or(
                Box::new(Formula::Less(lhs, Arith::Literal(2.0))),
                Box::new(Formula::And(
                    Box::new(Formula::Greater(Arith::target(1, "a"), Arith::Literal(1.0))),
                    Box::new(Formula::Greater(Arith::target(1, "b"), Arith::Literal(1.0))),
                )),
            )
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse_prediction("( 2 ; a )<(2;b)").unwrap(),
            parse_prediction("(2;a) < (2;b)").unwrap()
        );
    }

    #[test]
    fn parenthesized_formula() {
        let ast = parse_prediction("((1;a) < (1;b)) & ((1;b) < (1;c))").unwrap();
        assert!(matches!(ast, Formula::And(..)));
    }

    #[test]
    fn unclosed_target_points_at_offending_char() {
        // "(2;a < (2;b)": the `<` where `)` belongs is character 6.
        assert_eq!(col("(2;a < (2;b)"), 6);
    }

    #[test]
    fn error_columns() {
        assert_eq!(col("(2;a) < "), 9);
        assert_eq!(col("(2;a) < (2;b) (1;c)"), 15);
        assert_eq!(col("(2;a) # (2;b)"), 7);
        assert_eq!(col("(2;a) < (2;b) < (2;c)"), 15);
        assert_eq!(col("(2;3) < 1"), 4);
        assert_eq!(col("1. < 2"), 3);
    }

    #[test]
    fn type_errors() {
        // Bare arithmetic is not a formula.
        assert_eq!(col("(2;a) + (2;b)"), 1);
        // A comparison cannot be an arithmetic operand.
        assert_eq!(col("((1;a) < (1;b)) + 1 > 0"), 1);
        // Connectives need formulas on both sides.
        assert_eq!(col("(1;a) < 1 & 3"), 13);
    }

    #[test]
    fn non_ascii_columns_count_chars() {
        assert_eq!(col("(1;ñ) < (1;b) ¿"), 15);
    }
}
