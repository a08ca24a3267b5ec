//! S-expression reader and writer.
//!
//! All three input languages (the scheduling metamodel, the PDDL subset and
//! the lPROD net syntax) share this surface. Symbols are case-sensitive,
//! `?x` variables are ordinary symbols, and `:name` atoms become keywords.
//! Line comments start with `;`.

use std::fmt;

use thiserror::Error;

/// Position in the source text; line and column are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("unbalanced parentheses at {0}")]
    UnbalancedParens(Position),
    #[error("illegal token `{token}` at {pos}")]
    IllegalToken { pos: Position, token: String },
}

/// An exact decimal literal: `mantissa * 10^-scale`, with `scale >= 1`.
///
/// The scale is kept as written so that `1.50` prints back as `1.50`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decimal {
    pub mantissa: i64,
    pub scale: u8,
}

impl Decimal {
    pub fn new(mantissa: i64, scale: u8) -> Self {
        assert!(scale >= 1, "decimal literal needs at least one fractional digit");
        Decimal { mantissa, scale }
    }

    /// Integral part if the fractional digits are all zero.
    pub fn as_integer(&self) -> Option<i64> {
        let div = 10i64.checked_pow(self.scale as u32)?;
        (self.mantissa % div == 0).then(|| self.mantissa / div)
    }

    /// Same value with trailing fractional zeros removed (scale may reach 0).
    pub fn normalized(&self) -> (i64, u8) {
        let (mut m, mut s) = (self.mantissa, self.scale);
        while s > 0 && m % 10 == 0 {
            m /= 10;
            s -= 1;
        }
        (m, s)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = self.scale as u32;
        let div = 10u128.pow(scale);
        let abs = self.mantissa.unsigned_abs() as u128;
        let sign = if self.mantissa < 0 { "-" } else { "" };
        write!(f, "{sign}{}.{:0width$}", abs / div, abs % div, width = scale as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SExpr {
    Symbol(String),
    /// Stored without the leading `:`.
    Keyword(String),
    Int(i64),
    Real(Decimal),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn sym(name: impl Into<String>) -> Self {
        SExpr::Symbol(name.into())
    }

    pub fn kw(name: impl Into<String>) -> Self {
        SExpr::Keyword(name.into())
    }

    pub fn list(items: impl IntoIterator<Item = SExpr>) -> Self {
        SExpr::List(items.into_iter().collect())
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_keyword(&self) -> Option<&str> {
        match self {
            SExpr::Keyword(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn is_number(&self) -> bool {
        matches!(self, SExpr::Int(_) | SExpr::Real(_))
    }

    /// Head symbol of a list, e.g. `pl` for `(pl s0 Safe)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }

    /// True if this expression or any child is a real with non-zero fraction.
    pub fn has_fraction(&self) -> bool {
        match self {
            SExpr::Real(d) => d.as_integer().is_none(),
            SExpr::List(items) => items.iter().any(SExpr::has_fraction),
            _ => false,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Symbol(s) => f.write_str(s),
            SExpr::Keyword(s) => write!(f, ":{s}"),
            SExpr::Int(v) => write!(f, "{v}"),
            SExpr::Real(d) => write!(f, "{d}"),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Characters that may appear inside a symbol or keyword.
fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ';' | '"' | '\'' | '`' | ',' | '#' | '|' | '\\')
}

struct Reader<'a> {
    text: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl<'a> Reader<'a> {
    fn pos(&self) -> Position {
        Position { offset: self.offset, line: self.line, column: self.column }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_atom(&mut self) -> Result<SExpr, SexprError> {
        let start = self.pos();
        while self.peek().is_some_and(is_atom_char) {
            self.bump();
        }
        let token = &self.text[start.offset..self.offset];
        if token.is_empty() {
            // a character that can never start an atom, e.g. `"`
            let mut bad = String::new();
            if let Some(c) = self.bump() {
                bad.push(c);
            }
            return Err(SexprError::IllegalToken { pos: start, token: bad });
        }
        classify_atom(token).ok_or_else(|| SexprError::IllegalToken { pos: start, token: token.to_string() })
    }
}

fn classify_atom(token: &str) -> Option<SExpr> {
    let unsigned = token.strip_prefix('-').unwrap_or(token);
    let numeric_start = unsigned.starts_with(|c: char| c.is_ascii_digit());
    if numeric_start {
        if unsigned.bytes().all(|b| b.is_ascii_digit()) {
            return token.parse::<i64>().ok().map(SExpr::Int);
        }
        if let Some((whole, frac)) = unsigned.split_once('.') {
            let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
            if digits(whole) && digits(frac) {
                let scale = u8::try_from(frac.len()).ok().filter(|s| *s <= 18)?;
                let mantissa: i64 = format!("{whole}{frac}").parse().ok()?;
                let mantissa = if token.starts_with('-') { -mantissa } else { mantissa };
                return Some(SExpr::Real(Decimal::new(mantissa, scale)));
            }
            // malformed decimal such as `1.2.3` or `5.`
            return None;
        }
        // `5e3`, `1E-2`: scientific notation is not part of the language
        if is_scientific(unsigned) {
            return None;
        }
    }
    if let Some(name) = token.strip_prefix(':') {
        return (!name.is_empty()).then(|| SExpr::Keyword(name.to_string()));
    }
    Some(SExpr::Symbol(token.to_string()))
}

fn is_scientific(s: &str) -> bool {
    let Some(idx) = s.find(['e', 'E']) else { return false };
    let (mant, exp) = (&s[..idx], &s[idx + 1..]);
    let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
    !mant.is_empty()
        && mant.bytes().all(|b| b.is_ascii_digit() || b == b'.')
        && !exp.is_empty()
        && exp.bytes().all(|b| b.is_ascii_digit())
}

/// Reads every top-level expression in `text`, in order.
pub fn read_sexprs(text: &str) -> Result<Vec<SExpr>, SexprError> {
    let mut reader = Reader { text, offset: 0, line: 1, column: 1 };
    let mut out = Vec::new();
    // stack of open lists with the position of their `(`
    let mut stack: Vec<(Position, Vec<SExpr>)> = Vec::new();
    loop {
        reader.skip_trivia();
        let pos = reader.pos();
        let Some(c) = reader.peek() else { break };
        let item = match c {
            '(' => {
                reader.bump();
                stack.push((pos, Vec::new()));
                continue;
            }
            ')' => {
                reader.bump();
                let (_, items) = stack.pop().ok_or(SexprError::UnbalancedParens(pos))?;
                SExpr::List(items)
            }
            _ => reader.read_atom()?,
        };
        match stack.last_mut() {
            Some((_, items)) => items.push(item),
            None => out.push(item),
        }
    }
    if let Some((pos, _)) = stack.pop() {
        return Err(SexprError::UnbalancedParens(pos));
    }
    Ok(out)
}

/// Canonical single-line form: one space between items, no trailing space.
pub fn write_sexpr(e: &SExpr) -> String {
    e.to_string()
}

/// Multi-line layout used for files. Lists that fit in `width` columns are
/// written flat; longer lists put the head on the first line and each
/// remaining element on its own line, indented by two. A keyword stays on
/// the same line as the value that follows it.
pub fn write_pretty(e: &SExpr, width: usize) -> String {
    let mut out = String::new();
    pretty_into(e, 0, width, &mut out);
    out
}

fn pretty_into(e: &SExpr, column: usize, width: usize, out: &mut String) {
    let flat = e.to_string();
    let items = match e {
        SExpr::List(items) if column + flat.len() > width && items.len() > 1 => items,
        _ => {
            out.push_str(&flat);
            return;
        }
    };
    out.push('(');
    let mut rest = &items[..];
    // keep a leading atom (the form's head) on the opening line
    if !matches!(items[0], SExpr::List(_)) {
        let head = items[0].to_string();
        out.push_str(&head);
        rest = &items[1..];
        // a name right after the head shares the line: `(:action toSafe`,
        // `(define (problem p1)`
        let named = match rest.first() {
            Some(SExpr::Symbol(_)) => true,
            Some(SExpr::List(_)) => head == "define",
            _ => false,
        };
        if named {
            out.push(' ');
            out.push_str(&rest[0].to_string());
            rest = &rest[1..];
        }
    }
    let indent = column + 2;
    let mut i = 0;
    let mut first = rest.len() == items.len();
    while i < rest.len() {
        if first {
            first = false;
        } else {
            out.push('\n');
            out.push_str(&" ".repeat(indent));
        }
        match (&rest[i], rest.get(i + 1)) {
            (SExpr::Keyword(k), Some(value)) if !matches!(value, SExpr::Keyword(_)) => {
                out.push(':');
                out.push_str(k);
                out.push(' ');
                pretty_into(value, indent + k.len() + 2, width, out);
                i += 2;
            }
            (item, _) => {
                pretty_into(item, indent, width, out);
                i += 1;
            }
        }
    }
    out.push(')');
}
