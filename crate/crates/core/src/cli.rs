//! The `classmem` command line.
//!
//! Exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | accepted, nonempty, equivalent, or the command succeeded |
//! | 1    | rejected, empty, inequivalent |
//! | 2    | unknown: a bounded search found nothing |
//! | 10   | usage error |
//! | 11   | the verb does not apply to this model |
//! | 12   | an input file is missing, malformed or violates an invariant |
//! | 13   | a certificate failed its replay check (a bug) |

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cca::{cca_to_wcma, wcma_to_cca};
use crate::cma::{BoolMode, Cma};
use crate::coverability::{cma_empty_bounded, dwcma_equiv, vas_coverable, wcma_empty, wcma_to_vas, BoundedVerdict, Emptiness, Equivalence};
use crate::data::DataWord;
use crate::error::Error;
use crate::format::{self, print_word, Model};
use crate::homca::translate::{homca_prime_to_homca, homca_prime_to_ndcma, homca_to_homca_prime, ndcma_to_homca_prime};
use crate::homca::{HomcaLimits, Variant};
use crate::hra::{nrhra_to_wcma, wcma_to_nrhra};
use crate::ndcma::{desugar, forest_to_tuple, Ndcma};
use crate::petrinet::{
    encode_coverability_wcma, encode_reachability_cma, encode_reset_coverability_weak_ndcma, encode_reset_reachability_ndcma,
    PetriNet, QueryKind,
};
use crate::sample::all_strings;
use crate::wsts::{ndcma_weak_empty, WeakVerdict};

pub const ACCEPT: i32 = 0;
pub const REJECT: i32 = 1;
pub const UNKNOWN: i32 = 2;
pub const USAGE: i32 = 10;
pub const INCOMPATIBLE: i32 = 11;
pub const BAD_INPUT: i32 = 12;
pub const CERTIFICATE_FAILED: i32 = 13;

#[derive(Parser, Debug)]
#[command(
    name = "classmem",
    version,
    about = "Class memory automata and their relatives",
    after_help = "Exit status:\n  0   accept, nonempty, equivalent or success\n  1   reject, empty or inequivalent\n  2   unknown (a bounded search found nothing)\n  10  usage error\n  11  the verb does not apply to this model, or the engine refused it\n  12  unreadable, malformed or invalid input\n  13  a decoded firing sequence failed replay"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Decide membership of a data word (or, for HOMCA, of its letters).
    Run { model: String, automaton: String, word: String },
    /// Decide emptiness; strong machines need --bound and never answer "empty".
    Empty {
        model: String,
        automaton: String,
        #[arg(long)]
        bound: Option<usize>,
        /// Net whose coverability encoding the automaton is; decodes the witness.
        #[arg(long)]
        net: Option<String>,
    },
    /// Translate between models and print the result.
    Translate {
        model: String,
        automaton: String,
        #[arg(long)]
        to: String,
    },
    /// Union, intersection or complement.
    Boolean {
        op: BoolOp,
        model: String,
        automaton: String,
        other: Option<String>,
    },
    /// Language equivalence of deterministic weak machines.
    Equiv { model: String, left: String, right: String },
    /// Print the automaton encoding a Petri net query.
    EncodePetri {
        net: String,
        #[arg(long, value_enum)]
        mode: Option<EncodeMode>,
    },
    /// Decide a Petri net query through its encoding and replay the firing sequence.
    Certify {
        net: String,
        #[arg(long)]
        bound: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoolOp {
    Union,
    Intersection,
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EncodeMode {
    /// Strong flat CMA: nonempty iff the target is reachable.
    Reach,
    /// Weak flat CMA: nonempty iff the target is coverable.
    Cover,
    /// Strong level-2 NDCMA, resets allowed.
    ResetReach,
    /// Weak level-2 NDCMA, resets allowed.
    ResetCover,
}

/// What a command printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        stderr.push('\n');
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

type Step<T> = std::result::Result<T, Outcome>;

fn incompatible(e: Error) -> Outcome {
    Outcome::fail(INCOMPATIBLE, format!("error: {e}"))
}

/// Runs one command line; `args[0]` is the program name.
pub fn main_with<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome::ok(ACCEPT, text),
                _ => Outcome::fail(USAGE, text.trim_end()),
            };
        }
    };
    match dispatch(cli.verb) {
        Ok(o) | Err(o) => o,
    }
}

fn load(path: &str) -> Step<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Outcome::fail(BAD_INPUT, format!("error: {path}: {e}")))?;
    format::parse(&text).map_err(|e| Outcome::fail(BAD_INPUT, format!("error: {path}: {e}")))
}

fn load_word(path: &str) -> Step<DataWord> {
    match load(path)? {
        Model::Word(w) => Ok(w),
        m => Err(Outcome::fail(BAD_INPUT, format!("error: {path}: expected a word, found a `{}` file", m.tag()))),
    }
}

/// Loads `path` and checks it fits the `model` named on the command line.
/// A stricter flat tag satisfies a looser one (`dwcma` is a `wcma` is a `cma`).
fn load_as(model: &str, path: &str) -> Step<Model> {
    if !format::TAGS.contains(&model) && model != "homca'" {
        return Err(Outcome::fail(USAGE, format!("error: unknown model `{model}`; expected one of {}", format::TAGS.join(", "))));
    }
    let m = load(path)?;
    let fits = match (model, m.tag()) {
        ("cma", "wcma" | "dwcma") | ("wcma", "dwcma") => true,
        ("homca'", "homca") => matches!(&m, Model::Homca(h) if h.variant == Variant::HomcaPrime),
        (want, got) => want == got,
    };
    if !fits {
        return Err(Outcome::fail(BAD_INPUT, format!("error: {path}: expected a `{model}` file, found `{}`", m.tag())));
    }
    Ok(m)
}

fn load_net(path: &str) -> Step<PetriNet> {
    match load_as("net", path)? {
        Model::Net(n) => Ok(n),
        _ => unreachable!("load_as checked the tag"),
    }
}

fn dispatch(verb: Verb) -> Step<Outcome> {
    match verb {
        Verb::Run { model, automaton, word } => run(&model, &automaton, &word),
        Verb::Empty {
            model,
            automaton,
            bound,
            net,
        } => empty(&model, &automaton, bound, net.as_deref()),
        Verb::Translate { model, automaton, to } => translate(&model, &automaton, &to),
        Verb::Boolean {
            op,
            model,
            automaton,
            other,
        } => boolean(op, &model, &automaton, other.as_deref()),
        Verb::Equiv { model, left, right } => equiv(&model, &left, &right),
        Verb::EncodePetri { net, mode } => encode_petri(&net, mode),
        Verb::Certify { net, bound } => certify(&net, bound),
    }
}

fn verdict(yes: bool, yes_text: &str, no_text: &str) -> Outcome {
    if yes {
        Outcome::ok(ACCEPT, format!("{yes_text}\n"))
    } else {
        Outcome::ok(REJECT, format!("{no_text}\n"))
    }
}

fn run(model: &str, path: &str, word_path: &str) -> Step<Outcome> {
    let m = load_as(model, path)?;
    let w = load_word(word_path)?;
    let yes = match &m {
        Model::Cma(a) | Model::Wcma(a) | Model::Dwcma(a) => {
            let Some(run) = a.accepting_run(&w) else {
                return Ok(verdict(false, "", "reject"));
            };
            let last = run.last().expect("runs start with the initial configuration");
            let mut out = String::from("accept\nfinal memory:");
            let mut seen = std::collections::BTreeSet::new();
            for v in w.entries.iter().map(|e| e.value).filter(|v| seen.insert(*v)) {
                let _ = write!(out, " {}={}", w.universe.path(v), last.memory.get(v).map_or("bot", |s| a.states[s].as_str()));
            }
            out.push('\n');
            return Ok(Outcome::ok(ACCEPT, out));
        }
        Model::Cca(a) => a.accepts(&w),
        Model::NrHra(a) => a.accepts(&w),
        Model::Ndcma(a) => a.accepts(&w).map_err(incompatible)?,
        Model::Sugared(a) => a.accepts(&w).map_err(incompatible)?,
        Model::Da(a) => a.accepts(&w),
        Model::Nda(a) => {
            let t = forest_to_tuple(&w).map_err(incompatible)?;
            a.accepts(&t).map_err(incompatible)?
        }
        Model::Homca(h) => {
            let letters: Vec<String> = w.entries.iter().map(|e| e.letter.clone()).collect();
            let v = h.search(&letters, HomcaLimits::default());
            if !v.accepted && v.pruned {
                return Ok(Outcome::ok(UNKNOWN, "unknown: search limits reached before a decision\n".into()));
            }
            v.accepted
        }
        Model::Vas(_) | Model::Net(_) | Model::Word(_) => {
            return Err(Outcome::fail(INCOMPATIBLE, format!("error: `run` does not apply to `{}` files", m.tag())))
        }
    };
    Ok(verdict(yes, "accept", "reject"))
}

fn nonempty_word(w: &DataWord) -> Outcome {
    Outcome::ok(ACCEPT, format!("nonempty\nwitness:\n{}", print_word(w)))
}

fn weak_verdict(a: &Ndcma, v: WeakVerdict) -> Outcome {
    match v {
        WeakVerdict::Empty { basis_size } => Outcome::ok(REJECT, format!("empty\nbasis size: {basis_size}\n")),
        WeakVerdict::NonEmpty(c) => Outcome::ok(ACCEPT, format!("nonempty\ncertificate:\n{}", c.render(a))),
    }
}

fn bounded(v: BoundedVerdict, bound: usize) -> Outcome {
    match v {
        BoundedVerdict::NonEmpty(w) => nonempty_word(&w),
        BoundedVerdict::UnknownBeyondBound => Outcome::ok(UNKNOWN, format!("unknown: no accepted word within bound {bound}\n")),
    }
}

fn need_bound(bound: Option<usize>, what: &str) -> Step<usize> {
    bound.ok_or_else(|| Outcome::fail(USAGE, format!("error: {what}; pass --bound N for a bounded search that answers nonempty or unknown")))
}

fn empty(model: &str, path: &str, bound: Option<usize>, net: Option<&str>) -> Step<Outcome> {
    let m = load_as(model, path)?;
    if net.is_some() && !matches!(m, Model::Wcma(_) | Model::Dwcma(_)) {
        return Err(Outcome::fail(USAGE, "error: --net applies to weak CMA only"));
    }
    Ok(match m {
        Model::Wcma(a) | Model::Dwcma(a) => match wcma_empty(&a).map_err(incompatible)? {
            Emptiness::Empty => Outcome::ok(REJECT, "empty\n".into()),
            Emptiness::NonEmpty(w) => {
                let mut o = nonempty_word(&w);
                if let Some(net_path) = net {
                    let n = load_net(net_path)?;
                    let enc = encode_coverability_wcma(&n).map_err(incompatible)?;
                    if enc.machine != a {
                        return Err(Outcome::fail(INCOMPATIBLE, format!("error: {path} is not the coverability encoding of {net_path}")));
                    }
                    let seq = enc.decode(&w).expect("the witness is accepted");
                    o = certified(&n, &seq, o.stdout)?;
                }
                o
            }
        },
        Model::Cma(a) if a.is_weak() => match wcma_empty(&a).map_err(incompatible)? {
            Emptiness::Empty => Outcome::ok(REJECT, "empty\n".into()),
            Emptiness::NonEmpty(w) => nonempty_word(&w),
        },
        Model::Cma(a) => {
            let b = need_bound(bound, "emptiness of strong class memory automata is not decided here")?;
            bounded(cma_empty_bounded(&a, b), b)
        }
        Model::Cca(c) => match wcma_empty(&cca_to_wcma(&c)).map_err(incompatible)? {
            Emptiness::Empty => Outcome::ok(REJECT, "empty\n".into()),
            Emptiness::NonEmpty(w) => nonempty_word(&w),
        },
        Model::NrHra(h) => match wcma_empty(&nrhra_to_wcma(&h).map_err(incompatible)?).map_err(incompatible)? {
            Emptiness::Empty => Outcome::ok(REJECT, "empty\n".into()),
            Emptiness::NonEmpty(w) => nonempty_word(&w),
        },
        Model::Ndcma(a) => nested_empty(&a, bound)?,
        Model::Sugared(s) => nested_empty(&desugar(&s).map_err(incompatible)?, bound)?,
        Model::Vas(v) => {
            let r = vas_coverable(&v);
            match r.certificate {
                Some(rules) => {
                    let names: Vec<String> = rules.iter().map(|r| format!("r{r}")).collect();
                    Outcome::ok(ACCEPT, format!("coverable\nrules: {}\n", names.join(" ")))
                }
                None => Outcome::ok(REJECT, format!("not coverable\nbasis size: {}\n", r.basis_size)),
            }
        }
        Model::Homca(h) => {
            let b = need_bound(bound, "emptiness of higher-order multicounter automata is not decided here")?;
            for s in all_strings(&h.alphabet, b) {
                if h.search(&s, HomcaLimits::default()).accepted {
                    return Ok(Outcome::ok(ACCEPT, format!("nonempty\nwitness: {}\n", s.join(" "))));
                }
            }
            Outcome::ok(UNKNOWN, format!("unknown: no accepted string of length at most {b}\n"))
        }
        Model::Net(_) => return Err(Outcome::fail(INCOMPATIBLE, "error: use `certify` for Petri net queries")),
        m @ (Model::Da(_) | Model::Nda(_) | Model::Word(_)) => {
            return Err(Outcome::fail(INCOMPATIBLE, format!("error: `empty` does not apply to `{}` files", m.tag())))
        }
    })
}

fn nested_empty(a: &Ndcma, bound: Option<usize>) -> Step<Outcome> {
    if a.is_weak() {
        return Ok(weak_verdict(a, ndcma_weak_empty(a).map_err(incompatible)?));
    }
    let Some(b) = bound else {
        return Err(Outcome::fail(
            INCOMPATIBLE,
            "error: emptiness of strong nested class memory automata is undecidable (it encodes reachability of reset nets); \
             pass --bound N for a bounded search that answers nonempty or unknown",
        ));
    };
    Ok(bounded(a.empty_bounded(b, b).map_err(incompatible)?, b))
}

fn translate(model: &str, path: &str, to: &str) -> Step<Outcome> {
    let m = load_as(model, path)?;
    let out = match (m, to) {
        (Model::Wcma(a) | Model::Dwcma(a), "cca") => Model::Cca(wcma_to_cca(&a).map_err(incompatible)?),
        (Model::Wcma(a) | Model::Dwcma(a), "nrhra") => Model::NrHra(wcma_to_nrhra(&a).map_err(incompatible)?),
        (Model::Wcma(a) | Model::Dwcma(a), "vas") => Model::Vas(wcma_to_vas(&a).map_err(incompatible)?.0),
        (Model::Cca(c), "wcma") => Model::Wcma(cca_to_wcma(&c)),
        (Model::NrHra(h), "wcma") => Model::Wcma(nrhra_to_wcma(&h).map_err(incompatible)?),
        (Model::Cma(a) | Model::Wcma(a) | Model::Dwcma(a), "ndcma") => Model::Ndcma(Ndcma::from_cma(&a).map_err(incompatible)?),
        (Model::Ndcma(a), "cma") => Model::Cma(a.to_cma().map_err(incompatible)?),
        (Model::Ndcma(a), "homca'") => Model::Homca(ndcma_to_homca_prime(&a).map_err(incompatible)?),
        (Model::Sugared(s), "ndcma") => Model::Ndcma(desugar(&s).map_err(incompatible)?),
        (Model::Homca(h), "homca'") if h.variant == Variant::Homca => Model::Homca(homca_to_homca_prime(&h).map_err(incompatible)?),
        (Model::Homca(h), "homca") if h.variant == Variant::HomcaPrime => Model::Homca(homca_prime_to_homca(&h).map_err(incompatible)?),
        (Model::Homca(h), "sugared-ndcma") if h.variant == Variant::HomcaPrime => {
            Model::Sugared(homca_prime_to_ndcma(&h).map_err(incompatible)?)
        }
        (m, to) => {
            return Err(Outcome::fail(
                INCOMPATIBLE,
                format!("error: no translation from `{}` to `{to}`", if let Model::Homca(h) = &m { h.variant.to_string() } else { m.tag().to_string() }),
            ))
        }
    };
    Ok(Outcome::ok(ACCEPT, format::print(&out)))
}

/// Completes a deterministic weak machine so that Boolean operations apply.
fn completed(a: &Cma) -> Step<Cma> {
    if a.is_complete() {
        Ok(a.clone())
    } else {
        a.complete().map_err(incompatible)
    }
}

fn boolean(op: BoolOp, model: &str, path: &str, other: Option<&str>) -> Step<Outcome> {
    let a = load_as(model, path)?;
    let b = match (op, other) {
        (BoolOp::Complement, None) => None,
        (BoolOp::Complement, Some(_)) => return Err(Outcome::fail(USAGE, "error: complement takes one automaton")),
        (_, Some(p)) => Some(load_as(model, p)?),
        (_, None) => return Err(Outcome::fail(USAGE, "error: union and intersection take two automata")),
    };
    let mode = |op| if matches!(op, BoolOp::Union) { BoolMode::Union } else { BoolMode::Intersection };
    let out = match (a, b) {
        (Model::Cma(x) | Model::Wcma(x) | Model::Dwcma(x), None) => Model::Cma(completed(&x)?.complement().map_err(incompatible)?),
        (Model::Cma(x) | Model::Wcma(x) | Model::Dwcma(x), Some(Model::Cma(y) | Model::Wcma(y) | Model::Dwcma(y))) => {
            let (x, y) = if matches!(op, BoolOp::Union) { (completed(&x)?, completed(&y)?) } else { (x, y) };
            Model::Cma(x.product(&y, mode(op)).map_err(incompatible)?)
        }
        (Model::Ndcma(x), None) => Model::Ndcma(x.complete().map_err(incompatible)?.complement().map_err(incompatible)?),
        (Model::Ndcma(x), Some(Model::Ndcma(y))) => Model::Ndcma(x.product(&y, mode(op)).map_err(incompatible)?),
        (m, _) => return Err(Outcome::fail(INCOMPATIBLE, format!("error: Boolean operations do not apply to `{}` files", m.tag()))),
    };
    // the tag is re-derived so the output file states what it is
    let out = match out {
        Model::Cma(c) if c.is_weak() && c.is_deterministic() && c.silent.is_empty() => Model::Dwcma(c),
        Model::Cma(c) if c.is_weak() => Model::Wcma(c),
        o => o,
    };
    Ok(Outcome::ok(ACCEPT, format::print(&out)))
}

fn equiv(model: &str, left: &str, right: &str) -> Step<Outcome> {
    if model != "dwcma" {
        return Err(Outcome::fail(INCOMPATIBLE, "error: equivalence is decided for deterministic weak CMA (`dwcma`) only"));
    }
    let (Model::Dwcma(a), Model::Dwcma(b)) = (load_as(model, left)?, load_as(model, right)?) else {
        unreachable!("load_as checked the tags")
    };
    match dwcma_equiv(&a, &b).map_err(incompatible)? {
        Equivalence::Equivalent => {}
        Equivalence::Inequivalent { witness, left } => {
            let side = if left { "left" } else { "right" };
            return Ok(Outcome::ok(
                REJECT,
                format!("inequivalent\nwitness accepted only by the {side} automaton:\n{}", print_word(&witness)),
            ));
        }
    }
    Ok(Outcome::ok(ACCEPT, "equivalent\n".into()))
}

fn default_mode(net: &PetriNet) -> EncodeMode {
    match (net.has_resets(), net.query) {
        (false, QueryKind::Reach) => EncodeMode::Reach,
        (false, QueryKind::Cover) => EncodeMode::Cover,
        (true, QueryKind::Reach) => EncodeMode::ResetReach,
        (true, QueryKind::Cover) => EncodeMode::ResetCover,
    }
}

fn encode_petri(path: &str, mode: Option<EncodeMode>) -> Step<Outcome> {
    let net = load_net(path)?;
    let mode = mode.unwrap_or_else(|| default_mode(&net));
    let model = match mode {
        EncodeMode::Reach => Model::Cma(encode_reachability_cma(&net).map_err(incompatible)?.machine),
        EncodeMode::Cover => Model::Wcma(encode_coverability_wcma(&net).map_err(incompatible)?.machine),
        EncodeMode::ResetReach => Model::Ndcma(encode_reset_reachability_ndcma(&net).map_err(incompatible)?.machine),
        EncodeMode::ResetCover => Model::Ndcma(encode_reset_coverability_weak_ndcma(&net).map_err(incompatible)?.machine),
    };
    Ok(Outcome::ok(ACCEPT, format::print(&model)))
}

/// Replays a decoded firing sequence and appends it to `report`.
fn certified(net: &PetriNet, seq: &[usize], mut report: String) -> Step<Outcome> {
    let names: Vec<&str> = seq.iter().map(|t| net.transitions[*t].name.as_str()).collect();
    match net.replay(seq) {
        Ok(m) if net.satisfies(&m) => {
            let marking: Vec<String> = net.places.iter().zip(&m).map(|(p, k)| format!("{p}:{k}")).collect();
            let _ = writeln!(report, "firing sequence: {}", names.join(" "));
            let _ = writeln!(report, "reached marking: {}", marking.join(" "));
            Ok(Outcome::ok(ACCEPT, report))
        }
        _ => Err(Outcome::fail(CERTIFICATE_FAILED, format!("error: decoded sequence `{}` does not satisfy the query", names.join(" ")))),
    }
}

fn certify(path: &str, bound: Option<usize>) -> Step<Outcome> {
    let net = load_net(path)?;
    let no = |what: &str| Ok(Outcome::ok(REJECT, format!("{what}\n")));
    match default_mode(&net) {
        EncodeMode::Cover => {
            let enc = encode_coverability_wcma(&net).map_err(incompatible)?;
            match wcma_empty(&enc.machine).map_err(incompatible)? {
                Emptiness::Empty => no("not coverable"),
                Emptiness::NonEmpty(w) => {
                    let seq = enc.decode(&w).expect("the witness is accepted");
                    certified(&net, &seq, "coverable\n".into())
                }
            }
        }
        EncodeMode::ResetCover => {
            let enc = encode_reset_coverability_weak_ndcma(&net).map_err(incompatible)?;
            match enc.weak_emptiness().map_err(incompatible)? {
                WeakVerdict::Empty { .. } => no("not coverable"),
                WeakVerdict::NonEmpty(c) => {
                    let seq = enc.decode_controls(c.steps.iter().map(|(m, _)| m.to));
                    certified(&net, &seq, "coverable\n".into())
                }
            }
        }
        EncodeMode::Reach => {
            let b = need_bound(bound, "reachability queries are answered by bounded search only")?;
            let enc = encode_reachability_cma(&net).map_err(incompatible)?;
            match cma_empty_bounded(&enc.machine, b) {
                BoundedVerdict::NonEmpty(w) => {
                    let seq = enc.decode(&w).expect("the witness is accepted");
                    certified(&net, &seq, "reachable\n".into())
                }
                BoundedVerdict::UnknownBeyondBound => Ok(Outcome::ok(UNKNOWN, format!("unknown: nothing within bound {b}\n"))),
            }
        }
        EncodeMode::ResetReach => {
            let b = need_bound(bound, "reachability in reset nets is undecidable")?;
            let enc = encode_reset_reachability_ndcma(&net).map_err(incompatible)?;
            match enc.machine.empty_bounded(b, b).map_err(incompatible)? {
                BoundedVerdict::NonEmpty(w) => {
                    let seq = enc.decode(&w).map_err(incompatible)?.expect("the witness is accepted");
                    certified(&net, &seq, "reachable\n".into())
                }
                BoundedVerdict::UnknownBeyondBound => Ok(Outcome::ok(UNKNOWN, format!("unknown: nothing within bound {b}\n"))),
            }
        }
    }
}
