//! Recursive-descent parser for the structured-English requirement grammar.
//!
//! ```text
//! line      := ID ":" sentence
//! sentence  := scope "," body "."?
//! scope     := "Globally" | "Before" E | "After" E ("until" E)? | "Between" E "and" E
//! body      := "it is always the case that" ( E "holds" | "if" E "holds" ","? "then" tail )
//!            | "it is never the case that" E "holds"
//!            | "transitions to states in which" E "holds occur at most" N "times"
//!            | E "eventually holds"
//! tail      := E "eventually holds" ( "and is succeeded by" E )?
//!            | E "previously held" ( "and was followed by" E )?
//! E         := E "or" E | E "and" E | "not" E | "(" E ")" | "true" | "false"
//!            | IDENT ( CMP NUMBER )?
//! CMP       := "<" | "<=" | ">" | ">=" | "=" | "==" | "!=" | "≤" | "≥" | "≠"
//! ```
//!
//! Keywords are case-insensitive, identifiers are case-sensitive. Inside a
//! scope delimiter a top-level `and` ends the expression; parenthesize to
//! use conjunction there.

use std::collections::HashMap;

use super::{FrontendError, Pattern, PspInstance, Requirement, RequirementSet, Scope};
use crate::constant::Constant;
use crate::ltl::{is_usable_name, Formula, Rel};

/// Words that end an expression and therefore cannot name a signal.
const KEYWORDS: &[&str] = &["and", "or", "not", "holds", "held", "eventually", "until", "if", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: expected {}, found {found}", expected.join(" or "))]
pub struct SentenceError {
    /// 1-based character column within the sentence.
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Number(String),
    Cmp(Cmp),
    LParen,
    RParen,
    Comma,
    Period,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) | Tok::Number(w) => format!("`{w}`"),
            Tok::Cmp(_) => "a comparison operator".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Period => "`.`".into(),
            Tok::End => "end of line".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SentenceError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Period, 1),
            '<' if next == Some('=') => (Tok::Cmp(Cmp::Le), 2),
            '<' => (Tok::Cmp(Cmp::Lt), 1),
            '>' if next == Some('=') => (Tok::Cmp(Cmp::Ge), 2),
            '>' => (Tok::Cmp(Cmp::Gt), 1),
            '=' if next == Some('=') => (Tok::Cmp(Cmp::Eq), 2),
            '=' => (Tok::Cmp(Cmp::Eq), 1),
            '!' if next == Some('=') => (Tok::Cmp(Cmp::Ne), 2),
            '≤' => (Tok::Cmp(Cmp::Le), 1),
            '≥' => (Tok::Cmp(Cmp::Ge), 1),
            '≠' => (Tok::Cmp(Cmp::Ne), 1),
            c if c.is_ascii_digit() || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                (Tok::Number(chars[i..j].iter().collect()), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Word(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(SentenceError {
                    column,
                    expected: vec!["a word, number, comparison or punctuation".into()],
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, column));
        i += width;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn is_kw_at(&self, offset: usize, kw: &str) -> bool {
        matches!(self.peek_at(offset), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn is_kw(&self, kw: &str) -> bool {
        self.is_kw_at(0, kw)
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn error<S: AsRef<str>>(&self, expected: &[S]) -> SentenceError {
        let (tok, column) = &self.toks[self.pos];
        SentenceError {
            column: *column,
            expected: expected.iter().map(|s| s.as_ref().to_string()).collect(),
            found: tok.describe(),
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Consumes a fixed phrase such as `it is never the case that`.
    fn expect_phrase(&mut self, phrase: &str) -> Result<(), SentenceError> {
        for word in phrase.split(' ') {
            if !self.eat_kw(word) {
                return Err(self.error(&[format!("`{word}`")]));
            }
        }
        Ok(())
    }

    fn expect_tok(&mut self, tok: Tok, label: &str) -> Result<(), SentenceError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn sentence(&mut self) -> Result<PspInstance, SentenceError> {
        let scope = self.scope()?;
        self.expect_tok(Tok::Comma, "`,`")?;
        let pattern = self.body()?;
        if *self.peek() == Tok::Period {
            self.bump();
        }
        if *self.peek() != Tok::End {
            return Err(self.error(&["end of sentence"]));
        }
        Ok(PspInstance { scope, pattern })
    }

    fn scope(&mut self) -> Result<Scope, SentenceError> {
        if self.eat_kw("globally") {
            return Ok(Scope::Globally);
        }
        if self.eat_kw("before") {
            return Ok(Scope::Before(self.expr(true)?));
        }
        if self.eat_kw("after") {
            let q = self.expr(true)?;
            if self.eat_kw("until") {
                return Ok(Scope::AfterUntil(q, self.expr(true)?));
            }
            return Ok(Scope::After(q));
        }
        if self.eat_kw("between") {
            let q = self.expr(true)?;
            self.expect_phrase("and")?;
            return Ok(Scope::Between(q, self.expr(true)?));
        }
        Err(self.error(&["`Globally`", "`Before`", "`After`", "`Between`"]))
    }

    fn body(&mut self) -> Result<Pattern, SentenceError> {
        if self.is_kw("it") && self.is_kw_at(1, "is") {
            self.bump();
            self.bump();
            if self.eat_kw("never") {
                self.expect_phrase("the case that")?;
                let p = self.expr(false)?;
                self.expect_phrase("holds")?;
                return Ok(Pattern::Absence(p));
            }
            if !self.eat_kw("always") {
                return Err(self.error(&["`always`", "`never`"]));
            }
            self.expect_phrase("the case that")?;
            if self.eat_kw("if") {
                return self.conditional();
            }
            let p = self.expr(false)?;
            self.expect_phrase("holds")?;
            return Ok(Pattern::Universality(p));
        }
        if self.is_kw("transitions") && self.is_kw_at(1, "to") {
            self.expect_phrase("transitions to states in which")?;
            let payload = self.expr(false)?;
            self.expect_phrase("holds occur at most")?;
            let bound = match self.peek() {
                Tok::Number(n) => n.parse::<u32>().ok().filter(|k| *k >= 1),
                _ => None,
            }
            .ok_or_else(|| self.error(&["a positive integer bound"]))?;
            self.bump();
            self.expect_phrase("times")?;
            return Ok(Pattern::BoundedExistence { payload, bound });
        }
        let p = self.expr(false)?;
        self.expect_phrase("eventually holds")?;
        Ok(Pattern::Existence(p))
    }

    /// After `it is always the case that if`.
    fn conditional(&mut self) -> Result<Pattern, SentenceError> {
        let trigger = self.expr(false)?;
        self.expect_phrase("holds")?;
        if *self.peek() == Tok::Comma {
            self.bump();
        }
        self.expect_phrase("then")?;
        let first = self.expr(false)?;
        if self.eat_kw("eventually") {
            self.expect_phrase("holds")?;
            if self.eat_kw("and") {
                self.expect_phrase("is succeeded by")?;
                let second = self.expr(false)?;
                return Ok(Pattern::ResponseChain { trigger, first, second });
            }
            return Ok(Pattern::Response { trigger, response: first });
        }
        if self.eat_kw("previously") {
            self.expect_phrase("held")?;
            if self.eat_kw("and") {
                self.expect_phrase("was followed by")?;
                let second = self.expr(false)?;
                return Ok(Pattern::PrecedenceChain { trigger, first, second });
            }
            return Ok(Pattern::Precedence { trigger, cause: first });
        }
        Err(self.error(&["`eventually`", "`previously`"]))
    }

    /// `delimiter` stops at a top-level `and`.
    fn expr(&mut self, delimiter: bool) -> Result<Formula, SentenceError> {
        let mut lhs = self.conj(delimiter)?;
        while self.eat_kw("or") {
            lhs = lhs.or(self.conj(delimiter)?);
        }
        Ok(lhs)
    }

    fn conj(&mut self, delimiter: bool) -> Result<Formula, SentenceError> {
        let mut lhs = self.negation()?;
        while !delimiter && self.eat_kw("and") {
            lhs = lhs.and(self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Formula, SentenceError> {
        if self.eat_kw("not") {
            return Ok(self.negation()?.not());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, SentenceError> {
        const EXPECTED: &[&str] = &["an identifier", "`not`", "`(`", "`true`", "`false`"];
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.expr(false)?;
                self.expect_tok(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("true") => {
                self.bump();
                Ok(Formula::tt())
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("false") => {
                self.bump();
                Ok(Formula::ff())
            }
            Tok::Word(w) => {
                if KEYWORDS.contains(&w.to_ascii_lowercase().as_str()) || !is_usable_name(&w) || w.starts_with("__") {
                    return Err(self.error(EXPECTED));
                }
                self.bump();
                let Tok::Cmp(cmp) = *self.peek() else {
                    return Ok(Formula::prop(w));
                };
                self.bump();
                let constant = match self.peek() {
                    Tok::Number(n) => n.parse::<Constant>().ok(),
                    _ => None,
                }
                .ok_or_else(|| self.error(&["a number"]))?;
                self.bump();
                Ok(desugar(&w, cmp, constant))
            }
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Rewrites a comparison into `<` / `=` atoms.
fn desugar(var: &str, cmp: Cmp, c: Constant) -> Formula {
    let lt = || Formula::constraint(var, Rel::Lt, c.clone());
    let eq = || Formula::constraint(var, Rel::Eq, c.clone());
    match cmp {
        Cmp::Lt => lt(),
        Cmp::Eq => eq(),
        Cmp::Le => lt().or(eq()),
        Cmp::Gt => lt().or(eq()).not(),
        Cmp::Ge => lt().not(),
        Cmp::Ne => eq().not(),
    }
}

/// Parses one requirement sentence (without the `ID :` prefix).
pub fn parse_sentence(text: &str) -> Result<PspInstance, SentenceError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    parser.sentence()
}

/// Result of parsing one non-blank, non-comment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineOutcome {
    pub line: usize,
    pub id: Option<String>,
    pub result: Result<Requirement, FrontendError>,
}

fn is_requirement_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

/// Parses every requirement line independently, reporting a status per line.
pub fn parse_requirement_lines(text: &str) -> Vec<LineOutcome> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.chars().count() - trimmed.chars().count();
        let parse_error = |column: usize, expected: Vec<String>, found: String| FrontendError::Parse {
            line,
            column,
            expected,
            found,
        };

        let Some((id_part, sentence)) = trimmed.split_once(':') else {
            out.push(LineOutcome {
                line,
                id: None,
                result: Err(parse_error(
                    raw.chars().count() + 1,
                    vec!["`:` after the requirement id".into()],
                    "end of line".into(),
                )),
            });
            continue;
        };
        let id = id_part.trim().to_string();
        if !is_requirement_id(&id) {
            out.push(LineOutcome {
                line,
                id: None,
                result: Err(parse_error(indent + 1, vec!["a requirement id".into()], format!("`{id}`"))),
            });
            continue;
        }
        let sentence_offset = indent + id_part.chars().count() + 1;
        let result = match parse_sentence(sentence) {
            Err(e) => Err(parse_error(sentence_offset + e.column, e.expected, e.found)),
            Ok(psp) => match first_seen.get(&id) {
                Some(&first_line) => Err(FrontendError::DuplicateId { id: id.clone(), line, first_line }),
                None => {
                    first_seen.insert(id.clone(), line);
                    Ok(Requirement { id: id.clone(), source_text: sentence.trim().to_string(), psp })
                }
            },
        };
        out.push(LineOutcome { line, id: Some(id), result });
    }
    out
}

/// Parses a requirements file, failing on the first malformed line.
pub fn parse_requirements(text: &str) -> Result<RequirementSet, FrontendError> {
    parse_requirement_lines(text)
        .into_iter()
        .map(|outcome| outcome.result)
        .collect::<Result<Vec<_>, _>>()
        .map(RequirementSet::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> Formula {
        Formula::prop(name)
    }

    fn num(s: &str) -> Constant {
        s.parse().unwrap()
    }

    #[test]
    fn response_example_sentence() {
        let psp = parse_sentence(
            "Globally, it is always the case that if proximity_sensor < 20 holds, then arm_idle eventually holds.",
        )
        .unwrap();
        assert_eq!(psp.scope, Scope::Globally);
        assert_eq!(
            psp.pattern,
            Pattern::Response {
                trigger: Formula::constraint("proximity_sensor", Rel::Lt, num("20")),
                response: p("arm_idle"),
            }
        );
    }

    #[test]
    fn absence_and_existence() {
        let absence = parse_sentence("Globally, it is never the case that alarm holds.").unwrap();
        assert_eq!(absence.pattern, Pattern::Absence(p("alarm")));
        let existence = parse_sentence("Globally, temperature >= 5 eventually holds.").unwrap();
        assert_eq!(
            existence.pattern,
            Pattern::Existence(Formula::constraint("temperature", Rel::Lt, num("5")).not())
        );
    }

    #[test]
    fn scopes_and_keyword_case() {
        let s = parse_sentence("between (a and b) and c, IT IS ALWAYS THE CASE THAT p HOLDS").unwrap();
        assert_eq!(s.scope, Scope::Between(p("a").and(p("b")), p("c")));
        let s = parse_sentence("After start until stop, p eventually holds.").unwrap();
        assert_eq!(s.scope, Scope::AfterUntil(p("start"), p("stop")));
        let s = parse_sentence("Before done, it is never the case that err holds").unwrap();
        assert_eq!(s.scope, Scope::Before(p("done")));
    }

    #[test]
    fn chains_and_bounded() {
        let s = parse_sentence(
            "Globally, it is always the case that if req holds, then ack eventually holds and is succeeded by done.",
        )
        .unwrap();
        assert_eq!(s.pattern, Pattern::ResponseChain { trigger: p("req"), first: p("ack"), second: p("done") });
        let s = parse_sentence(
            "Globally, it is always the case that if fire holds, then arm and ready previously held and was followed by go.",
        )
        .unwrap();
        assert_eq!(
            s.pattern,
            Pattern::PrecedenceChain { trigger: p("fire"), first: p("arm").and(p("ready")), second: p("go") }
        );
        let s = parse_sentence("Globally, transitions to states in which x > 3 holds occur at most 2 times.").unwrap();
        let gt3 = Formula::constraint("x", Rel::Lt, num("3"))
            .or(Formula::constraint("x", Rel::Eq, num("3")))
            .not();
        assert_eq!(s.pattern, Pattern::BoundedExistence { payload: gt3, bound: 2 });
    }

    #[test]
    fn all_comparisons_desugar() {
        let parse_payload = |cmp: &str| {
            match parse_sentence(&format!("Globally, x {cmp} 1.5 eventually holds")).unwrap().pattern {
                Pattern::Existence(f) => f.to_string(),
                other => panic!("{other:?}"),
            }
        };
        assert_eq!(parse_payload("<"), "x < 1.5");
        assert_eq!(parse_payload("="), "x = 1.5");
        assert_eq!(parse_payload("<="), "x < 1.5 | x = 1.5");
        assert_eq!(parse_payload("≤"), "x < 1.5 | x = 1.5");
        assert_eq!(parse_payload(">"), "!(x < 1.5 | x = 1.5)");
        assert_eq!(parse_payload(">="), "!(x < 1.5)");
        assert_eq!(parse_payload("!="), "!(x = 1.5)");
    }

    #[test]
    fn errors_report_position_and_expectation() {
        let err = parse_sentence("Globally it is never the case that alarm holds").unwrap_err();
        assert_eq!(err.column, 10);
        assert_eq!(err.expected, vec!["`,`"]);

        let err = parse_sentence("Globally, it is sometimes the case that p holds").unwrap_err();
        assert_eq!(err.expected, vec!["`always`", "`never`"]);

        let err = parse_sentence("Globally, transitions to states in which p holds occur at most 0 times").unwrap_err();
        assert_eq!(err.expected, vec!["a positive integer bound"]);

        for bad in [
            "Globally, __x__r0 eventually holds",
            "Globally, F eventually holds",
            "Globally, holds eventually holds",
            "Globally, x < y eventually holds",
            "Globally, p eventually holds extra",
            "Sometimes, p eventually holds",
        ] {
            assert!(parse_sentence(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn file_format() {
        let text = "# comment\n\nR1: Globally, p eventually holds.\n  R.2-b : Globally, it is never the case that q holds\n";
        let set = parse_requirements(text).unwrap();
        assert_eq!(set.ids(), vec!["R1", "R.2-b"]);
        assert_eq!(set.requirements[0].source_text, "Globally, p eventually holds.");
    }

    #[test]
    fn file_errors_have_line_and_column() {
        let err = parse_requirements("R1: Globally, p eventually holds\nR2: Globally p eventually holds\n").unwrap_err();
        assert_eq!(err, FrontendError::Parse {
            line: 2,
            column: 14,
            expected: vec!["`,`".into()],
            found: "`p`".into(),
        });
        let err = parse_requirements("R1: Globally, p eventually holds\nR1: Globally, q eventually holds\n").unwrap_err();
        assert_eq!(err, FrontendError::DuplicateId { id: "R1".into(), line: 2, first_line: 1 });
        assert!(matches!(parse_requirements("no colon here"), Err(FrontendError::Parse { line: 1, .. })));
        assert!(matches!(parse_requirements("bad id!: Globally, p eventually holds"), Err(FrontendError::Parse { .. })));
    }

    #[test]
    fn per_line_outcomes_continue_past_errors() {
        let outcomes = parse_requirement_lines("A: Globally, p eventually holds\nB: nonsense\nC: Globally, q eventually holds");
        assert_eq!(outcomes.len(), 3);
        assert!(outcomes[0].result.is_ok());
        assert!(outcomes[1].result.is_err());
        assert_eq!(outcomes[1].id.as_deref(), Some("B"));
        assert!(outcomes[2].result.is_ok());
    }
}
