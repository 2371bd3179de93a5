//! The interchange text format shared by every model.
//!
//! A file is a list of lines; `#` starts a comment. Header lines have the
//! shape `key: items`, the `model:` header selects the schema of the rest.
//! Names never contain whitespace or any of `( ) [ ] { } , :`. Printing is
//! canonical and parsing what was printed gives back the same description.
//! The grammar is spelled out in `docs/format.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::cca::{Cca, CcaTransition, CmpOp, Update};
use crate::cma::{Cma, Memory, StateId};
use crate::coverability::{Vas, VasRule};
use crate::data::{DataWord, Universe};
use crate::dataaut::{ClassNfa, DataAutomaton, NestedDataAutomaton, Transducer};
use crate::error::{Error, Result};
use crate::homca::{Homca, HomcaOp, HomcaTransition, Variant};
use crate::hra::{set_to_string, HistorySet, HraTransition, NrHra, MAX_TYPE};
use crate::ndcma::{Guard, Ndcma, SugaredNdcma};
use crate::petrinet::{PetriNet, QueryKind};

/// A parsed file. The tag of class memory automata records which
/// restriction (`cma`, `wcma`, `dwcma`) was checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Cma(Cma),
    Wcma(Cma),
    Dwcma(Cma),
    Cca(Cca),
    NrHra(NrHra),
    Ndcma(Ndcma),
    Sugared(SugaredNdcma),
    Homca(Homca),
    Vas(Vas),
    Net(PetriNet),
    Da(DataAutomaton),
    Nda(NestedDataAutomaton),
    Word(DataWord),
}

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::Cma(_) => "cma",
            Model::Wcma(_) => "wcma",
            Model::Dwcma(_) => "dwcma",
            Model::Cca(_) => "cca",
            Model::NrHra(_) => "nrhra",
            Model::Ndcma(_) => "ndcma",
            Model::Sugared(_) => "sugared-ndcma",
            Model::Homca(_) => "homca",
            Model::Vas(_) => "vas",
            Model::Net(_) => "net",
            Model::Da(_) => "da",
            Model::Nda(_) => "nda",
            Model::Word(_) => "word",
        }
    }
}

pub const TAGS: [&str; 13] = [
    "cma",
    "wcma",
    "dwcma",
    "cca",
    "nrhra",
    "ndcma",
    "sugared-ndcma",
    "homca",
    "vas",
    "net",
    "da",
    "nda",
    "word",
];

// ---------------------------------------------------------------------------
// lexing

#[derive(Clone, Debug)]
struct Line {
    no: usize,
    toks: Vec<String>,
}

impl Line {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.no, msg)
    }
}

const PUNCT: [char; 8] = ['(', ')', '[', ']', '{', '}', ',', ':'];

fn lex(text: &str) -> Vec<Line> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = Vec::new();
        for word in body.split_whitespace() {
            if word == "->" {
                toks.push(word.to_string());
                continue;
            }
            let mut cur = String::new();
            for c in word.chars() {
                if PUNCT.contains(&c) {
                    if !cur.is_empty() {
                        toks.push(std::mem::take(&mut cur));
                    }
                    toks.push(c.to_string());
                } else {
                    cur.push(c);
                }
            }
            if !cur.is_empty() {
                toks.push(cur);
            }
        }
        if !toks.is_empty() {
            out.push(Line { no: i + 1, toks });
        }
    }
    out
}

/// Headers (`key: ...`) and the remaining body lines, in file order.
struct Doc {
    headers: BTreeMap<String, Line>,
    body: Vec<Line>,
    last: usize,
}

impl Doc {
    fn split(lines: Vec<Line>) -> Result<Doc> {
        let last = lines.last().map_or(1, |l| l.no);
        let mut headers = BTreeMap::new();
        let mut body = Vec::new();
        for l in lines {
            if l.toks.len() >= 2 && l.toks[1] == ":" && !matches!(l.toks[0].as_str(), "trans" | "rule" | "silent") {
                let key = l.toks[0].clone();
                let rest = Line {
                    no: l.no,
                    toks: l.toks[2..].to_vec(),
                };
                if headers.insert(key.clone(), rest).is_some() {
                    return Err(Error::parse(l.no, format!("header `{key}` given twice")));
                }
            } else {
                body.push(l);
            }
        }
        Ok(Doc { headers, body, last })
    }

    fn header(&self, key: &str) -> Result<&Line> {
        self.headers
            .get(key)
            .ok_or_else(|| Error::parse(self.last, format!("missing header `{key}:`")))
    }

    /// Whitespace-separated names of a header; commas are optional.
    fn names(&self, key: &str) -> Result<Vec<String>> {
        let l = self.header(key)?;
        let names: Vec<String> = l.toks.iter().filter(|t| *t != ",").cloned().collect();
        if let Some(bad) = names.iter().find(|t| t.len() == 1 && PUNCT.contains(&t.chars().next().unwrap())) {
            return Err(l.err(format!("unexpected `{bad}` in `{key}:`")));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(*n)) {
            return Err(l.err(format!("`{dup}` listed twice in `{key}:`")));
        }
        Ok(names)
    }

    fn names_or_empty(&self, key: &str) -> Result<Vec<String>> {
        if self.headers.contains_key(key) {
            self.names(key)
        } else {
            Ok(Vec::new())
        }
    }

    fn single(&self, key: &str) -> Result<(String, &Line)> {
        let l = self.header(key)?;
        match l.toks.as_slice() {
            [one] => Ok((one.clone(), l)),
            _ => Err(l.err(format!("`{key}:` takes exactly one item"))),
        }
    }

    fn number(&self, key: &str) -> Result<usize> {
        let (s, l) = self.single(key)?;
        s.parse().map_err(|_| l.err(format!("`{key}:` needs a number, found `{s}`")))
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for (k, l) in &self.headers {
            if k != "model" && !allowed.contains(&k.as_str()) {
                return Err(l.err(format!("unknown header `{k}:`")));
            }
        }
        Ok(())
    }
}

fn lookup(names: &[String], name: &str, what: &str, l: &Line) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| l.err(format!("unknown {what} `{name}`")))
}

fn lookup_set(names: &[String], items: &[String], what: &str, l: &Line) -> Result<BTreeSet<usize>> {
    items.iter().map(|n| lookup(names, n, what, l)).collect()
}

/// Cursor over the tokens of one body line.
struct Toks<'a> {
    line: &'a Line,
    at: usize,
}

impl<'a> Toks<'a> {
    fn new(line: &'a Line) -> Self {
        Toks { line, at: 0 }
    }

    fn peek(&self) -> Option<&'a str> {
        self.line.toks.get(self.at).map(String::as_str)
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        let t = self
            .line
            .toks
            .get(self.at)
            .ok_or_else(|| self.line.err(format!("expected {what} at end of line")))?;
        self.at += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        let t = self.next(&format!("`{tok}`"))?;
        if t != tok {
            return Err(self.line.err(format!("expected `{tok}`, found `{t}`")));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        let t = self.next(what)?;
        t.parse().map_err(|_| self.line.err(format!("expected {what}, found `{t}`")))
    }

    fn end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.line.err(format!("unexpected `{t}`"))),
        }
    }

    /// `open item (, item)* close` with possibly no items.
    fn list(&mut self, open: &str, close: &str) -> Result<Vec<&'a str>> {
        self.expect(open)?;
        let mut items = Vec::new();
        if self.peek() == Some(close) {
            self.at += 1;
            return Ok(items);
        }
        loop {
            items.push(self.next("a list item")?);
            match self.next(&format!("`,` or `{close}`"))? {
                "," => continue,
                t if t == close => return Ok(items),
                t => return Err(self.line.err(format!("expected `,` or `{close}`, found `{t}`"))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// entry points

/// Parses a file of any model. Files without a `model:` header are read as words.
pub fn parse(text: &str) -> Result<Model> {
    let lines = lex(text);
    let tag = lines
        .iter()
        .find(|l| l.toks.len() >= 2 && l.toks[0] == "model" && l.toks[1] == ":")
        .map(|l| (l.toks.get(2).cloned(), l.no));
    let tag = match tag {
        None => return parse_word_lines(lines).map(Model::Word),
        Some((Some(t), _)) => t,
        Some((None, no)) => return Err(Error::parse(no, "`model:` needs a tag")),
    };
    if tag == "word" {
        return parse_word_lines(lines).map(Model::Word);
    }
    let doc = Doc::split(lines)?;
    match tag.as_str() {
        "cma" | "wcma" | "dwcma" => parse_cma(&doc, &tag),
        "cca" => parse_cca(&doc).map(Model::Cca),
        "nrhra" => parse_nrhra(&doc).map(Model::NrHra),
        "ndcma" => parse_ndcma(&doc).map(Model::Ndcma),
        "sugared-ndcma" => parse_sugared(&doc).map(Model::Sugared),
        "homca" => parse_homca(&doc).map(Model::Homca),
        "vas" => parse_vas(&doc).map(Model::Vas),
        "net" => parse_net(&doc).map(Model::Net),
        "da" | "nda" => parse_da(&doc, &tag),
        other => Err(Error::parse(
            doc.headers["model"].no,
            format!("unknown model `{other}`; expected one of {}", TAGS.join(", ")),
        )),
    }
}

/// Canonical text of a model.
pub fn print(m: &Model) -> String {
    match m {
        Model::Cma(a) | Model::Wcma(a) | Model::Dwcma(a) => print_cma(a, m.tag()),
        Model::Cca(a) => print_cca(a),
        Model::NrHra(a) => print_nrhra(a),
        Model::Ndcma(a) => print_ndcma(a),
        Model::Sugared(a) => print_sugared(a),
        Model::Homca(a) => print_homca(a),
        Model::Vas(v) => print_vas(v),
        Model::Net(n) => print_net(n),
        Model::Da(d) => print_da(&d.base, std::slice::from_ref(&d.class), "da"),
        Model::Nda(d) => print_da(&d.base, &d.classes, "nda"),
        Model::Word(w) => print_word(w),
    }
}

pub fn parse_word(text: &str) -> Result<DataWord> {
    parse_word_lines(lex(text))
}

fn items(names: &[String], set: impl IntoIterator<Item = usize>) -> String {
    set.into_iter().map(|i| format!(" {}", names[i])).collect()
}

fn header(out: &mut String, key: &str, value: &str) {
    let _ = writeln!(out, "{key}:{value}");
}

fn list_header(out: &mut String, key: &str, names: &[String]) {
    header(out, key, &items(names, 0..names.len()));
}

// ---------------------------------------------------------------------------
// words

fn parse_word_lines(lines: Vec<Line>) -> Result<DataWord> {
    let mut level = None;
    let mut entries = Vec::new();
    for l in lines {
        match l.toks.as_slice() {
            [k, c, rest @ ..] if c == ":" && k == "model" => {
                if rest != ["word"] {
                    return Err(l.err("a word file has `model: word`"));
                }
            }
            [k, c, n] if c == ":" && k == "level" => {
                level = Some(n.parse::<usize>().map_err(|_| l.err(format!("bad level `{n}`")))?);
            }
            [letter, value] => entries.push((l.no, letter.clone(), value.clone())),
            _ => return Err(l.err("expected `letter value`")),
        }
    }
    let depth = entries.iter().map(|(_, _, v)| v.split('/').count()).max().unwrap_or(1);
    let level = level.unwrap_or(depth);
    if level == 0 {
        return Err(Error::parse(1, "level must be at least 1"));
    }
    let mut w = DataWord::new(if level == 1 { Universe::flat() } else { Universe::nested(level) });
    for (no, letter, value) in entries {
        let v = w
            .universe
            .intern_path(&value)
            .map_err(|e| Error::parse(no, format!("value `{value}`: {e}")))?;
        w.push(letter, v);
    }
    Ok(w)
}

pub fn print_word(w: &DataWord) -> String {
    let mut out = String::from("model: word\n");
    if w.universe.bound() > 1 {
        let _ = writeln!(out, "level: {}", w.universe.bound());
    }
    for e in &w.entries {
        let _ = writeln!(out, "{} {}", e.letter, w.universe.path(e.value));
    }
    out
}

// ---------------------------------------------------------------------------
// class memory automata

fn memory_name(states: &[String], m: Memory) -> String {
    m.map_or_else(|| "bot".to_string(), |s| states[s].clone())
}

fn memory_of(states: &[String], tok: &str, l: &Line) -> Result<Memory> {
    if tok == "bot" || tok == "⊥" {
        Ok(None)
    } else {
        lookup(states, tok, "state", l).map(Some)
    }
}

fn parse_cma(doc: &Doc, tag: &str) -> Result<Model> {
    doc.reject_unknown(&["states", "alphabet", "initial", "locally_accepting", "globally_accepting"])?;
    let states = doc.names("states")?;
    let alphabet = doc.names("alphabet")?;
    let (init, il) = doc.single("initial")?;
    let initial = lookup(&states, &init, "state", il)?;
    let mut a = Cma::new(states.clone(), alphabet.clone(), initial);
    if doc.headers.contains_key("locally_accepting") {
        a.locally_accepting = lookup_set(&states, &doc.names("locally_accepting")?, "state", doc.header("locally_accepting")?)?;
    }
    a.globally_accepting = lookup_set(&states, &doc.names_or_empty("globally_accepting")?, "state", doc.header("globally_accepting").unwrap_or(il))?;
    for l in &doc.body {
        let mut t = Toks::new(l);
        match t.next("a keyword")? {
            "trans" => {
                let q = lookup(&states, t.next("a state")?, "state", l)?;
                let x = lookup(&alphabet, t.next("a letter")?, "letter", l)?;
                let m = memory_of(&states, t.next("a memory")?, l)?;
                t.expect("->")?;
                let to = lookup(&states, t.next("a state")?, "state", l)?;
                t.end()?;
                a.add_transition(q, x, m, to);
            }
            "silent" => {
                let q = lookup(&states, t.next("a state")?, "state", l)?;
                t.expect("->")?;
                let to = lookup(&states, t.next("a state")?, "state", l)?;
                t.end()?;
                a.silent.insert((q, to));
            }
            k => return Err(l.err(format!("unexpected `{k}`; expected `trans` or `silent`"))),
        }
    }
    a.validate()?;
    Ok(match tag {
        "wcma" => {
            a.require_weak()?;
            Model::Wcma(a)
        }
        "dwcma" => {
            a.require_weak()?;
            if !a.is_deterministic() {
                return Err(Error::NotDeterministic("a `dwcma` file must be deterministic".into()));
            }
            Model::Dwcma(a)
        }
        _ => Model::Cma(a),
    })
}

fn print_cma(a: &Cma, tag: &str) -> String {
    let mut out = String::new();
    header(&mut out, "model", &format!(" {tag}"));
    list_header(&mut out, "states", &a.states);
    list_header(&mut out, "alphabet", &a.alphabet);
    header(&mut out, "initial", &format!(" {}", a.states[a.initial]));
    header(&mut out, "locally_accepting", &items(&a.states, a.locally_accepting.iter().copied()));
    header(&mut out, "globally_accepting", &items(&a.states, a.globally_accepting.iter().copied()));
    for ((q, x, m), ts) in &a.transitions {
        for t in ts {
            let _ = writeln!(out, "trans {} {} {} -> {}", a.states[*q], a.alphabet[*x], memory_name(&a.states, *m), a.states[*t]);
        }
    }
    for (q, t) in &a.silent {
        let _ = writeln!(out, "silent {} -> {}", a.states[*q], a.states[*t]);
    }
    out
}

// ---------------------------------------------------------------------------
// class counting automata

fn parse_cca(doc: &Doc) -> Result<Cca> {
    doc.reject_unknown(&["states", "alphabet", "initial", "accepting"])?;
    let states = doc.names("states")?;
    let alphabet = doc.names("alphabet")?;
    let (init, il) = doc.single("initial")?;
    let initial = lookup(&states, &init, "state", il)?;
    let accepting = lookup_set(&states, &doc.names_or_empty("accepting")?, "state", il)?;
    let mut transitions = BTreeSet::new();
    for l in &doc.body {
        let mut t = Toks::new(l);
        t.expect("trans")?;
        let from = lookup(&states, t.next("a state")?, "state", l)?;
        let letter = lookup(&alphabet, t.next("a letter")?, "letter", l)?;
        t.expect("(")?;
        let op = t.next("a comparison")?;
        let op = CmpOp::from_symbol(op).ok_or_else(|| l.err(format!("unknown comparison `{op}`")))?;
        let e = t.number("a constant")?;
        t.expect(")")?;
        let update = match t.next("`inc` or `set`")? {
            "inc" => Update::Inc,
            "set" => Update::Set,
            u => return Err(l.err(format!("expected `inc` or `set`, found `{u}`"))),
        };
        let amount = t.number("an amount")?;
        t.expect("->")?;
        let to = lookup(&states, t.next("a state")?, "state", l)?;
        t.end()?;
        transitions.insert(CcaTransition {
            from,
            letter,
            guard: (op, e),
            update,
            amount,
            to,
        });
    }
    Ok(Cca {
        states,
        alphabet,
        initial,
        accepting,
        transitions,
    })
}

fn print_cca(a: &Cca) -> String {
    let mut out = String::new();
    header(&mut out, "model", " cca");
    list_header(&mut out, "states", &a.states);
    list_header(&mut out, "alphabet", &a.alphabet);
    header(&mut out, "initial", &format!(" {}", a.states[a.initial]));
    header(&mut out, "accepting", &items(&a.states, a.accepting.iter().copied()));
    for t in &a.transitions {
        let u = match t.update {
            Update::Inc => "inc",
            Update::Set => "set",
        };
        let _ = writeln!(
            out,
            "trans {} {} ({} {}) {u} {} -> {}",
            a.states[t.from],
            a.alphabet[t.letter],
            t.guard.0.symbol(),
            t.guard.1,
            t.amount,
            a.states[t.to]
        );
    }
    out
}

// ---------------------------------------------------------------------------
// history register automata

fn history_set(t: &mut Toks, m: usize) -> Result<HistorySet> {
    let mut x: HistorySet = 0;
    for item in t.list("{", "}")? {
        let i: usize = item.parse().map_err(|_| t.line.err(format!("bad history `{item}`")))?;
        if i == 0 || i > m {
            return Err(t.line.err(format!("history {i} outside 1..={m}")));
        }
        x |= 1 << (i - 1);
    }
    Ok(x)
}

fn parse_nrhra(doc: &Doc) -> Result<NrHra> {
    doc.reject_unknown(&["histories", "states", "alphabet", "initial", "accepting"])?;
    let histories = doc.number("histories")?;
    if histories == 0 || histories > MAX_TYPE {
        return Err(doc.header("histories")?.err(format!("`histories:` must lie in 1..={MAX_TYPE}")));
    }
    let states = doc.names("states")?;
    let alphabet = doc.names("alphabet")?;
    let (init, il) = doc.single("initial")?;
    let initial = lookup(&states, &init, "state", il)?;
    let accepting = lookup_set(&states, &doc.names_or_empty("accepting")?, "state", il)?;
    let mut transitions = BTreeSet::new();
    for l in &doc.body {
        let mut t = Toks::new(l);
        t.expect("trans")?;
        let from = lookup(&states, t.next("a state")?, "state", l)?;
        let letter = lookup(&alphabet, t.next("a letter")?, "letter", l)?;
        let guard = history_set(&mut t, histories)?;
        let update = history_set(&mut t, histories)?;
        t.expect("->")?;
        let to = lookup(&states, t.next("a state")?, "state", l)?;
        t.end()?;
        transitions.insert(HraTransition {
            from,
            letter,
            guard,
            update,
            to,
        });
    }
    let a = NrHra {
        histories,
        states,
        alphabet,
        initial,
        accepting,
        transitions,
    };
    a.validate()?;
    Ok(a)
}

fn print_nrhra(a: &NrHra) -> String {
    let mut out = String::new();
    header(&mut out, "model", " nrhra");
    header(&mut out, "histories", &format!(" {}", a.histories));
    list_header(&mut out, "states", &a.states);
    list_header(&mut out, "alphabet", &a.alphabet);
    header(&mut out, "initial", &format!(" {}", a.states[a.initial]));
    header(&mut out, "accepting", &items(&a.states, a.accepting.iter().copied()));
    for t in &a.transitions {
        let _ = writeln!(
            out,
            "trans {} {} {} {} -> {}",
            a.states[t.from],
            a.alphabet[t.letter],
            set_to_string(t.guard),
            set_to_string(t.update),
            a.states[t.to]
        );
    }
    out
}

// ---------------------------------------------------------------------------
// nested machines

struct NdHead {
    level: usize,
    states: Vec<String>,
    alphabet: Vec<String>,
    initial: StateId,
    fl: Option<BTreeSet<StateId>>,
    fg: BTreeSet<StateId>,
}

fn nd_head(doc: &Doc) -> Result<NdHead> {
    doc.reject_unknown(&["level", "states", "alphabet", "initial", "locally_accepting", "globally_accepting"])?;
    let level = doc.number("level")?;
    if level == 0 {
        return Err(doc.header("level")?.err("level must be at least 1"));
    }
    let states = doc.names("states")?;
    let alphabet = doc.names("alphabet")?;
    let (init, il) = doc.single("initial")?;
    let initial = lookup(&states, &init, "state", il)?;
    let fl = match doc.headers.get("locally_accepting") {
        Some(l) => Some(lookup_set(&states, &doc.names("locally_accepting")?, "state", l)?),
        None => None,
    };
    let fg = lookup_set(&states, &doc.names_or_empty("globally_accepting")?, "state", il)?;
    Ok(NdHead {
        level,
        states,
        alphabet,
        initial,
        fl,
        fg,
    })
}

/// `trans q a level i [..] -> q'` up to the target; returns the cursor.
fn nd_read<'a>(h: &NdHead, l: &'a Line, entries: usize) -> Result<(StateId, Option<usize>, Guard, Toks<'a>)> {
    let mut t = Toks::new(l);
    t.expect("trans")?;
    let q = lookup(&h.states, t.next("a state")?, "state", l)?;
    let letter = match t.next("a letter")? {
        "eps" => None,
        x => Some(lookup(&h.alphabet, x, "letter", l)?),
    };
    t.expect("level")?;
    let i = t.number("a level")? as usize;
    if i == 0 || i > h.level {
        return Err(l.err(format!("read level {i} outside 1..={}", h.level)));
    }
    let guard: Guard = t
        .list("[", "]")?
        .iter()
        .map(|m| memory_of(&h.states, m, l))
        .collect::<Result<_>>()?;
    if guard.len() != i + entries {
        return Err(l.err(format!("a level-{i} read needs {} guard entries, found {}", i + entries, guard.len())));
    }
    t.expect("->")?;
    Ok((q, letter, guard, t))
}

fn guard_text(states: &[String], g: &[Memory]) -> String {
    let parts: Vec<String> = g.iter().map(|m| memory_name(states, *m)).collect();
    format!("[{}]", parts.join(","))
}

fn letter_text(alphabet: &[String], l: Option<usize>) -> String {
    l.map_or_else(|| "eps".to_string(), |x| alphabet[x].clone())
}

fn parse_ndcma(doc: &Doc) -> Result<Ndcma> {
    let h = nd_head(doc)?;
    let mut a = Ndcma::new(h.level, h.states.clone(), h.alphabet.clone(), h.initial);
    if let Some(fl) = &h.fl {
        a.locally_accepting = fl.clone();
    }
    a.globally_accepting = h.fg.clone();
    for l in &doc.body {
        let (q, letter, guard, mut t) = nd_read(&h, l, 0)?;
        let to = lookup(&h.states, t.next("a state")?, "state", l)?;
        t.end()?;
        a.add_transition(q, letter, guard, to);
    }
    a.validate()?;
    Ok(a)
}

/// Header fields shared by plain and sugared nested machines.
struct NdPrint<'a> {
    level: usize,
    states: &'a [String],
    alphabet: &'a [String],
    initial: StateId,
    fl: &'a BTreeSet<StateId>,
    fg: &'a BTreeSet<StateId>,
}

fn nd_headers(out: &mut String, tag: &str, h: NdPrint<'_>) {
    let NdPrint { level, states, alphabet, initial, fl, fg } = h;
    header(out, "model", &format!(" {tag}"));
    header(out, "level", &format!(" {level}"));
    list_header(out, "states", states);
    list_header(out, "alphabet", alphabet);
    header(out, "initial", &format!(" {}", states[initial]));
    header(out, "locally_accepting", &items(states, fl.iter().copied()));
    header(out, "globally_accepting", &items(states, fg.iter().copied()));
}

fn print_ndcma(a: &Ndcma) -> String {
    let mut out = String::new();
    nd_headers(
        &mut out,
        "ndcma",
        NdPrint { level: a.level, states: &a.states, alphabet: &a.alphabet, initial: a.initial, fl: &a.locally_accepting, fg: &a.globally_accepting },
    );
    for ((q, x, g), ts) in &a.transitions {
        for t in ts {
            let _ = writeln!(
                out,
                "trans {} {} level {} {} -> {}",
                a.states[*q],
                letter_text(&a.alphabet, *x),
                g.len(),
                guard_text(&a.states, g),
                a.states[*t]
            );
        }
    }
    out
}

fn parse_sugared(doc: &Doc) -> Result<SugaredNdcma> {
    let h = nd_head(doc)?;
    let mut a = SugaredNdcma::new(h.level, h.states.clone(), h.alphabet.clone(), h.initial);
    if let Some(fl) = &h.fl {
        a.locally_accepting = fl.clone();
    }
    a.globally_accepting = h.fg.clone();
    for l in &doc.body {
        let (q, letter, guard, mut t) = nd_read(&h, l, 1)?;
        let to = lookup(&h.states, t.next("a state")?, "state", l)?;
        let targets: Vec<StateId> = t
            .list("[", "]")?
            .iter()
            .map(|s| lookup(&h.states, s, "state", l))
            .collect::<Result<_>>()?;
        t.end()?;
        if targets.len() != guard.len() {
            return Err(l.err(format!("{} targets for {} guard entries", targets.len(), guard.len())));
        }
        a.add_transition(q, letter, guard, to, targets);
    }
    a.validate()?;
    Ok(a)
}

fn print_sugared(a: &SugaredNdcma) -> String {
    let mut out = String::new();
    nd_headers(
        &mut out,
        "sugared-ndcma",
        NdPrint { level: a.level, states: &a.states, alphabet: &a.alphabet, initial: a.initial, fl: &a.locally_accepting, fg: &a.globally_accepting },
    );
    for ((q, x, g), ts) in &a.transitions {
        for (to, v) in ts {
            let targets: Vec<&str> = v.iter().map(|s| a.states[*s].as_str()).collect();
            let _ = writeln!(
                out,
                "trans {} {} level {} {} -> {} [{}]",
                a.states[*q],
                letter_text(&a.alphabet, *x),
                g.len() - 1,
                guard_text(&a.states, g),
                a.states[*to],
                targets.join(",")
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// higher-order multicounter automata

fn parse_op(m: &Homca, tok: &str, l: &Line) -> Result<HomcaOp> {
    let (name, arg) = tok.split_once('_').ok_or_else(|| l.err(format!("bad operation `{tok}`")))?;
    let level = |arg: &str| -> Result<usize> {
        let i: usize = arg.parse().map_err(|_| l.err(format!("bad level in `{tok}`")))?;
        if i == 0 || i > m.level {
            return Err(l.err(format!("level {i} outside 1..={} in `{tok}`", m.level)));
        }
        Ok(i)
    };
    Ok(match name {
        "new" => HomcaOp::New(level(arg)?),
        "store" => HomcaOp::Store(level(arg)?),
        "load" => HomcaOp::Load(level(arg)?),
        "inc" => HomcaOp::Inc(lookup(&m.symbols, arg, "symbol", l)?),
        "dec" => HomcaOp::Dec(lookup(&m.symbols, arg, "symbol", l)?),
        _ => return Err(l.err(format!("unknown operation `{tok}`"))),
    })
}

fn parse_homca(doc: &Doc) -> Result<Homca> {
    doc.reject_unknown(&["variant", "weak", "level", "states", "alphabet", "symbols", "initial", "accepting"])?;
    let (variant, vl) = doc.single("variant")?;
    let variant = match variant.as_str() {
        "homca" => Variant::Homca,
        "homca'" => Variant::HomcaPrime,
        v => return Err(vl.err(format!("variant `{v}`; expected `homca` or `homca'`"))),
    };
    let weak = match doc.headers.get("weak") {
        None => false,
        Some(_) => match doc.single("weak")? {
            (w, _) if w == "yes" => true,
            (w, _) if w == "no" => false,
            (w, l) => return Err(l.err(format!("`weak:` is `yes` or `no`, found `{w}`"))),
        },
    };
    let level = doc.number("level")?;
    let mut m = Homca::new(level, doc.names("states")?, doc.names("alphabet")?, doc.names_or_empty("symbols")?, variant);
    m.weak = weak;
    let (init, il) = doc.single("initial")?;
    m.initial = lookup(&m.states, &init, "state", il)?;
    m.accepting = lookup_set(&m.states, &doc.names_or_empty("accepting")?, "state", il)?;
    for l in &doc.body {
        let mut t = Toks::new(l);
        t.expect("trans")?;
        let from = lookup(&m.states, t.next("a state")?, "state", l)?;
        let letter = match t.next("a letter")? {
            "eps" => None,
            x => Some(lookup(&m.alphabet, x, "letter", l)?),
        };
        let op = parse_op(&m, t.next("an operation")?, l)?;
        t.expect("->")?;
        let to = lookup(&m.states, t.next("a state")?, "state", l)?;
        t.end()?;
        m.transitions.insert(HomcaTransition { from, letter, op, to });
    }
    m.validate()?;
    Ok(m)
}

fn print_homca(m: &Homca) -> String {
    let mut out = String::new();
    header(&mut out, "model", " homca");
    header(&mut out, "variant", &format!(" {}", m.variant));
    header(&mut out, "weak", if m.weak { " yes" } else { " no" });
    header(&mut out, "level", &format!(" {}", m.level));
    list_header(&mut out, "states", &m.states);
    list_header(&mut out, "alphabet", &m.alphabet);
    list_header(&mut out, "symbols", &m.symbols);
    header(&mut out, "initial", &format!(" {}", m.states[m.initial]));
    header(&mut out, "accepting", &items(&m.states, m.accepting.iter().copied()));
    for t in &m.transitions {
        let _ = writeln!(
            out,
            "trans {} {} {} -> {}",
            m.states[t.from],
            letter_text(&m.alphabet, t.letter),
            m.render_op(t.op),
            m.states[t.to]
        );
    }
    out
}

// ---------------------------------------------------------------------------
// vector addition systems

/// `{c:k, ...}` as a count vector.
fn count_map(t: &mut Toks, names: &[String]) -> Result<Vec<u32>> {
    let mut v = vec![0u32; names.len()];
    t.expect("{")?;
    if t.peek() == Some("}") {
        t.at += 1;
        return Ok(v);
    }
    loop {
        let c = lookup(names, t.next("a name")?, "counter", t.line)?;
        t.expect(":")?;
        v[c] += t.number("a count")? as u32;
        match t.next("`,` or `}`")? {
            "," => continue,
            "}" => return Ok(v),
            x => return Err(t.line.err(format!("expected `,` or `}}`, found `{x}`"))),
        }
    }
}

fn count_map_text(names: &[String], v: &[u32]) -> String {
    let parts: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, k)| **k > 0)
        .map(|(i, k)| format!("{}:{k}", names[i]))
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn parse_vas(doc: &Doc) -> Result<Vas> {
    doc.reject_unknown(&["counters", "states", "initial"])?;
    let counters = doc.names("counters")?;
    let states = doc.names("states")?;
    let il = doc.header("initial")?;
    let mut t = Toks::new(il);
    let q0 = lookup(&states, t.next("a state")?, "state", il)?;
    let v0 = if t.peek().is_some() { count_map(&mut t, &counters)? } else { vec![0; counters.len()] };
    t.end()?;
    let mut rules = Vec::new();
    let mut targets = Vec::new();
    for l in &doc.body {
        let mut t = Toks::new(l);
        match t.next("a keyword")? {
            "rule" => {
                let from = lookup(&states, t.next("a state")?, "state", l)?;
                let mut dec = vec![0u32; counters.len()];
                let mut inc = vec![0u32; counters.len()];
                while t.peek() == Some("[") {
                    t.at += 1;
                    let which = match t.next("`dec` or `inc`")? {
                        "dec" => &mut dec,
                        "inc" => &mut inc,
                        x => return Err(l.err(format!("expected `dec` or `inc`, found `{x}`"))),
                    };
                    t.expect(":")?;
                    if t.peek() == Some("]") {
                        t.at += 1;
                        continue;
                    }
                    loop {
                        which[lookup(&counters, t.next("a counter")?, "counter", l)?] += 1;
                        match t.next("`,` or `]`")? {
                            "," => continue,
                            "]" => break,
                            x => return Err(l.err(format!("expected `,` or `]`, found `{x}`"))),
                        }
                    }
                }
                t.expect("->")?;
                let to = lookup(&states, t.next("a state")?, "state", l)?;
                t.end()?;
                rules.push(VasRule { from, dec, inc, to });
            }
            "cover" => {
                let q = lookup(&states, t.next("a state")?, "state", l)?;
                let v = count_map(&mut t, &counters)?;
                t.end()?;
                targets.push((q, v));
            }
            k => return Err(l.err(format!("unexpected `{k}`; expected `rule` or `cover`"))),
        }
    }
    Ok(Vas {
        counters,
        states,
        initial: (q0, v0),
        rules,
        targets,
    })
}

fn units_text(names: &[String], v: &[u32]) -> String {
    let parts: Vec<&str> = v
        .iter()
        .enumerate()
        .flat_map(|(i, k)| std::iter::repeat_n(names[i].as_str(), *k as usize))
        .collect();
    parts.join(",")
}

fn print_vas(v: &Vas) -> String {
    let mut out = String::new();
    header(&mut out, "model", " vas");
    list_header(&mut out, "counters", &v.counters);
    list_header(&mut out, "states", &v.states);
    header(&mut out, "initial", &format!(" {} {}", v.states[v.initial.0], count_map_text(&v.counters, &v.initial.1)));
    for r in &v.rules {
        let _ = writeln!(
            out,
            "rule {} [dec: {}] [inc: {}] -> {}",
            v.states[r.from],
            units_text(&v.counters, &r.dec),
            units_text(&v.counters, &r.inc),
            v.states[r.to]
        );
    }
    for (q, c) in &v.targets {
        let _ = writeln!(out, "cover {} {}", v.states[*q], count_map_text(&v.counters, c));
    }
    out
}

// ---------------------------------------------------------------------------
// Petri nets

/// `p` or `p:k` items until a keyword or the end of the line.
fn place_units(t: &mut Toks, places: &[String], into: &mut [u32], stop: &[&str]) -> Result<()> {
    while let Some(tok) = t.peek() {
        if stop.contains(&tok) {
            break;
        }
        t.at += 1;
        let p = lookup(places, tok, "place", t.line)?;
        let k = if t.peek() == Some(":") {
            t.at += 1;
            t.number("a count")? as u32
        } else {
            1
        };
        into[p] += k;
    }
    Ok(())
}

fn parse_net(doc: &Doc) -> Result<PetriNet> {
    doc.reject_unknown(&[])?;
    let mut places = Vec::new();
    let mut initial = Vec::new();
    for l in doc.body.iter().filter(|l| l.toks[0] == "place") {
        let mut t = Toks::new(l);
        t.expect("place")?;
        let name = t.next("a place")?.to_string();
        if places.contains(&name) {
            return Err(l.err(format!("place `{name}` declared twice")));
        }
        let k = if t.peek().is_some() {
            t.expect("init")?;
            t.number("a count")? as u32
        } else {
            0
        };
        t.end()?;
        places.push(name);
        initial.push(k);
    }
    let mut net = PetriNet::new(places.clone());
    net.initial = initial;
    let mut query = None;
    let n = places.len();
    for l in &doc.body {
        let mut t = Toks::new(l);
        match t.next("a keyword")? {
            "place" => {}
            "trans" => {
                let name = t.next("a transition name")?.to_string();
                let mut input = vec![0; n];
                let mut output = vec![0; n];
                let mut reset_units = vec![0; n];
                let keys = ["in", "out", "reset"];
                while let Some(k) = t.peek() {
                    t.at += 1;
                    let into = match k {
                        "in" => &mut input,
                        "out" => &mut output,
                        "reset" => &mut reset_units,
                        x => return Err(l.err(format!("expected `in`, `out` or `reset`, found `{x}`"))),
                    };
                    place_units(&mut t, &places, into, &keys)?;
                }
                net.transitions.push(crate::petrinet::NetTransition {
                    name,
                    input,
                    output,
                    reset: reset_units.iter().map(|k| *k > 0).collect(),
                });
            }
            "query" => {
                if query.is_some() {
                    return Err(l.err("a net has one query"));
                }
                let kind = match t.next("`cover` or `reach`")? {
                    "cover" => QueryKind::Cover,
                    "reach" => QueryKind::Reach,
                    x => return Err(l.err(format!("expected `cover` or `reach`, found `{x}`"))),
                };
                let mut target = vec![0; n];
                place_units(&mut t, &places, &mut target, &[])?;
                query = Some((kind, target));
            }
            k => return Err(l.err(format!("unexpected `{k}`; expected `place`, `trans` or `query`"))),
        }
    }
    let (kind, target) = query.ok_or_else(|| Error::parse(doc.last, "missing `query` line"))?;
    net.query = kind;
    net.target = target;
    net.validate()?;
    Ok(net)
}

fn net_units(places: &[String], v: &[u32]) -> String {
    v.iter()
        .enumerate()
        .filter(|(_, k)| **k > 0)
        .map(|(i, k)| if *k == 1 { format!(" {}", places[i]) } else { format!(" {}:{k}", places[i]) })
        .collect()
}

fn print_net(net: &PetriNet) -> String {
    let mut out = String::from("model: net\n");
    for (p, k) in net.places.iter().zip(&net.initial) {
        let _ = writeln!(out, "place {p} init {k}");
    }
    for t in &net.transitions {
        let _ = write!(out, "trans {}", t.name);
        if t.input.iter().any(|k| *k > 0) {
            let _ = write!(out, " in{}", net_units(&net.places, &t.input));
        }
        if t.reset.iter().any(|r| *r) {
            let r: Vec<u32> = t.reset.iter().map(|r| *r as u32).collect();
            let _ = write!(out, " reset{}", net_units(&net.places, &r));
        }
        if t.output.iter().any(|k| *k > 0) {
            let _ = write!(out, " out{}", net_units(&net.places, &t.output));
        }
        out.push('\n');
    }
    let kind = match net.query {
        QueryKind::Cover => "cover",
        QueryKind::Reach => "reach",
    };
    let _ = writeln!(out, "query {kind}{}", net_units(&net.places, &net.target));
    out
}

// ---------------------------------------------------------------------------
// data automata

fn parse_class(level: usize, lines: &[&Line], output: &[String]) -> Result<ClassNfa> {
    let mut states = None;
    let mut initial = None;
    let mut accepting = None;
    let mut trans = Vec::new();
    for l in lines {
        let rest = &l.toks[2..];
        match rest {
            [k, c, names @ ..] if c == ":" => {
                let names: Vec<String> = names.iter().filter(|t| *t != ",").cloned().collect();
                match k.as_str() {
                    "states" => states = Some(names),
                    "initial" => initial = Some((names, *l)),
                    "accepting" => accepting = Some((names, *l)),
                    _ => return Err(l.err(format!("unknown class header `{k}:`"))),
                }
            }
            [k, ..] if k == "trans" => trans.push(*l),
            _ => return Err(l.err("expected a class header or `trans`")),
        }
    }
    let no = lines.first().map_or(1, |l| l.no);
    let states = states.ok_or_else(|| Error::parse(no, format!("class {level} lacks `states:`")))?;
    let (init, il) = initial.ok_or_else(|| Error::parse(no, format!("class {level} lacks `initial:`")))?;
    let [init] = init.as_slice() else {
        return Err(il.err("`initial:` takes exactly one item"));
    };
    let initial = lookup(&states, init, "class state", il)?;
    let accepting = match accepting {
        Some((names, l)) => lookup_set(&states, &names, "class state", l)?,
        None => BTreeSet::new(),
    };
    let mut transitions = BTreeSet::new();
    for l in trans {
        let sub = Line {
            no: l.no,
            toks: l.toks[2..].to_vec(),
        };
        let mut t = Toks::new(&sub);
        t.expect("trans")?;
        let p = lookup(&states, t.next("a class state")?, "class state", &sub)?;
        let b = lookup(output, t.next("an output letter")?, "output letter", &sub)?;
        t.expect("->")?;
        let q = lookup(&states, t.next("a class state")?, "class state", &sub)?;
        t.end()?;
        transitions.insert((p, b, q));
    }
    Ok(ClassNfa {
        states,
        initial,
        accepting,
        transitions,
    })
}

fn parse_da(doc: &Doc, tag: &str) -> Result<Model> {
    doc.reject_unknown(&["level", "states", "input", "output", "initial", "accepting"])?;
    let level = if tag == "da" { 1 } else { doc.number("level")? };
    if level == 0 {
        return Err(doc.header("level")?.err("level must be at least 1"));
    }
    let states = doc.names("states")?;
    let input = doc.names("input")?;
    let output = doc.names("output")?;
    let (init, il) = doc.single("initial")?;
    let initial = lookup(&states, &init, "state", il)?;
    let accepting = lookup_set(&states, &doc.names_or_empty("accepting")?, "state", il)?;
    let mut transitions = BTreeSet::new();
    let mut class_lines: Vec<Vec<&Line>> = vec![Vec::new(); level];
    for l in &doc.body {
        match l.toks[0].as_str() {
            "class" => {
                let i: usize = l
                    .toks
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| l.err("expected `class <level>`"))?;
                if i == 0 || i > level {
                    return Err(l.err(format!("class level {i} outside 1..={level}")));
                }
                class_lines[i - 1].push(l);
            }
            "trans" => {
                let mut t = Toks::new(l);
                t.expect("trans")?;
                let p = lookup(&states, t.next("a state")?, "state", l)?;
                let io = t.next("`input/output`")?;
                let (a, b) = io.split_once('/').ok_or_else(|| l.err(format!("expected `input/output`, found `{io}`")))?;
                let a = lookup(&input, a, "input letter", l)?;
                let b = lookup(&output, b, "output letter", l)?;
                t.expect("->")?;
                let q = lookup(&states, t.next("a state")?, "state", l)?;
                t.end()?;
                transitions.insert((p, a, b, q));
            }
            k => return Err(l.err(format!("unexpected `{k}`; expected `trans` or `class`"))),
        }
    }
    let base = Transducer {
        states,
        input,
        output: output.clone(),
        initial,
        accepting,
        transitions,
    };
    let classes: Vec<ClassNfa> = class_lines
        .iter()
        .enumerate()
        .map(|(i, ls)| parse_class(i + 1, ls, &output))
        .collect::<Result<_>>()?;
    Ok(if tag == "da" {
        Model::Da(DataAutomaton {
            base,
            class: classes.into_iter().next().expect("one class"),
        })
    } else {
        Model::Nda(NestedDataAutomaton { base, classes })
    })
}

fn print_da(base: &Transducer, classes: &[ClassNfa], tag: &str) -> String {
    let mut out = String::new();
    header(&mut out, "model", &format!(" {tag}"));
    if tag == "nda" {
        header(&mut out, "level", &format!(" {}", classes.len()));
    }
    list_header(&mut out, "states", &base.states);
    list_header(&mut out, "input", &base.input);
    list_header(&mut out, "output", &base.output);
    header(&mut out, "initial", &format!(" {}", base.states[base.initial]));
    header(&mut out, "accepting", &items(&base.states, base.accepting.iter().copied()));
    for (p, a, b, q) in &base.transitions {
        let _ = writeln!(out, "trans {} {}/{} -> {}", base.states[*p], base.input[*a], base.output[*b], base.states[*q]);
    }
    for (i, c) in classes.iter().enumerate() {
        let i = i + 1;
        let _ = writeln!(out, "class {i} states:{}", items(&c.states, 0..c.states.len()));
        let _ = writeln!(out, "class {i} initial: {}", c.states[c.initial]);
        let _ = writeln!(out, "class {i} accepting:{}", items(&c.states, c.accepting.iter().copied()));
        for (p, b, q) in &c.transitions {
            let _ = writeln!(out, "class {i} trans {} {} -> {}", c.states[*p], base.output[*b], c.states[*q]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexer_splits_punctuation_but_not_names() {
        let l = lex("trans <q|1+3> a [bot,s1] -> q~2 # note");
        assert_eq!(l[0].toks, ["trans", "<q|1+3>", "a", "[", "bot", ",", "s1", "]", "->", "q~2"]);
    }

    #[test]
    fn errors_carry_the_line() {
        let text = "model: cma\nstates: q\nalphabet: a\ninitial: q\ntrans q b bot -> q\n";
        assert_eq!(parse(text).unwrap_err(), Error::parse(5, "unknown letter `b`"));
    }
}
