use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use gos_core::construct::{bounded_corank_search, build_gos, ConstructError};
use gos_core::cylinders::{describe_circle, Cylinders};
use gos_core::gos::{Gos, VertexClass};
use gos_core::io::{generate, union_to_dot, Instance, Kind, RunReport};
use gos_core::oracle::{self, Corpus, Fault, Module, Scope};
use gos_core::reports::{corollary_report, find_root_homomorphism, theorem_report, Claim, Method, ReportError};
use gos_core::splitting::{every_component_has_bad_cylinder, split_to_bad};
use gos_core::uot;
use gos_core::words::{format_letters, letter_char, whitehead_minimize, Word};

use crate::Opts;

pub enum Failure {
    Parse(String),
    Precondition(String),
    Internal(String),
}

type Outcome = Result<u8, Failure>;

const DEFAULT_MAX_LENGTH: usize = 3;

fn load(file: &Option<PathBuf>) -> Result<(Instance, Option<u64>), Failure> {
    let path = file.as_ref().ok_or_else(|| Failure::Parse("no instance file given".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    Instance::load(&text).map_err(|e| {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    })
}

fn construct_failure(e: ConstructError) -> Failure {
    match e {
        ConstructError::Build(_) => Failure::Internal(e.to_string()),
        e => Failure::Precondition(e.to_string()),
    }
}

fn report_failure(e: ReportError) -> Failure {
    match e {
        ReportError::Hypothesis(_) => Failure::Precondition(e.to_string()),
        e => Failure::Internal(e.to_string()),
    }
}

fn text(w: &[i32]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        format_letters(w)
    }
}

/// The graph of spaces of an instance, with the instance normalized so
/// that rerunning on it needs no search.
fn space(inst: Instance, o: &Opts) -> Result<(Gos, Instance), Failure> {
    match inst {
        Instance::RawGos { gos, rank } => {
            gos.validate().map_err(|e| Failure::Precondition(e.to_string()))?;
            Ok((gos.clone(), Instance::RawGos { gos, rank }))
        }
        Instance::HnnConjugacy(d) => {
            let b = build_gos(&d).map_err(construct_failure)?;
            Ok((b.built.gos, Instance::HnnConjugacy(d)))
        }
        Instance::AdjoinRoot { data, hom } => {
            let max = o.max_length.unwrap_or(DEFAULT_MAX_LENGTH);
            let hom = match hom {
                Some(h) => h,
                None => find_root_homomorphism(&data, max, o.parallel > 1)
                    .ok_or_else(|| Failure::Precondition(format!("no maximal-corank homomorphism with images of length at most {max}")))?,
            };
            let d = data.to_gofg(hom.0.clone(), hom.1.clone(), data.rank).map_err(construct_failure)?;
            let b = build_gos(&d).map_err(construct_failure)?;
            Ok((b.built.gos, Instance::AdjoinRoot { data, hom: Some(hom) }))
        }
        Instance::UnionOfTrees(_) => Err(Failure::Precondition("a union of trees is not a graph of spaces".into())),
    }
}

struct Run<'a> {
    report: RunReport,
    start: Instant,
    o: &'a Opts,
}

impl<'a> Run<'a> {
    fn new(command: &str, kind: Option<Kind>, o: &'a Opts) -> Run<'a> {
        Run {
            report: RunReport::new(command, kind),
            start: Instant::now(),
            o,
        }
    }

    fn claim(&mut self, statement: impl Into<String>, holds: bool, method: Method) -> bool {
        self.report.claims.push(Claim {
            statement: statement.into(),
            holds,
            method,
        });
        holds
    }

    fn line(&mut self, s: impl Into<String>) {
        self.report.summary.push(s.into());
    }

    fn dot(&self, name: &str, body: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.o.dot {
            fs::create_dir_all(dir).map_err(|e| Failure::Internal(format!("{}: {e}", dir.display())))?;
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }

    /// Prints and writes the report; `code` is the exit code for a false
    /// verdict.
    fn finish(mut self, code: u8) -> Outcome {
        if self.o.timings {
            self.report.timings_ms.insert("total".into(), self.start.elapsed().as_millis() as u64);
        }
        let body = serde_json::to_string_pretty(&self.report).expect("reports serialize") + "\n";
        match self.o.json.as_deref() {
            Some(p) if p == Path::new("-") => print!("{body}"),
            Some(p) => {
                fs::write(p, &body).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?;
                print_summary(&self.report);
            }
            None => print_summary(&self.report),
        }
        Ok(if self.report.verdict { 0 } else { code })
    }
}

fn print_summary(r: &RunReport) {
    for l in &r.summary {
        println!("{l}");
    }
    for c in r.claims.iter().filter(|c| !c.holds) {
        println!("failed claim: {} [{:?}]", c.statement, c.method);
    }
}

pub fn validate(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let mut run = Run::new("validate", Some(inst.kind()), o);
    run.report.instance = Some(inst.to_file(seed));
    if let Instance::UnionOfTrees(z) = &inst {
        match z.validate() {
            Ok(()) => {
                let rects = z.rectangles.len();
                run.line(format!("valid union of trees: {} trees, {rects} rectangles", z.trees.len()));
            }
            Err(e) => {
                run.report.verdict = false;
                run.line(format!("violation: {e}"));
            }
        }
        return run.finish(2);
    }
    match space(inst, o) {
        Ok((x, _)) => {
            let (ch, cu) = (x.chi_horizontal(), x.chi_underlying());
            run.line(format!("valid 2-covered graph of spaces: {} vertices, {} edges", x.n_vertices(), x.n_edges()));
            run.line(format!("χ(Γ) = {ch}, χ(Γ_U) = {cu}"));
            let ok = run.claim("χ(Γ) ≤ χ(Γ_U)", ch <= cu, Method::Direct);
            run.report.details = json!({"vertices": x.n_vertices(), "edges": x.n_edges(), "chiHorizontal": ch, "chiUnderlying": cu});
            run.dot("gos.dot", &x.to_dot())?;
            if !ok {
                run.report.verdict = false;
                return run.finish(1);
            }
        }
        Err(Failure::Precondition(m)) => {
            run.report.verdict = false;
            run.line(format!("violation: {m}"));
        }
        Err(f) => return Err(f),
    }
    run.finish(2)
}

pub fn minimize(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let mut run = Run::new("minimize", Some(inst.kind()), o);
    let (x, norm) = space(inst, o)?;
    run.report.instance = Some(norm.to_file(seed));
    let m = x.minimize().map_err(|e| Failure::Internal(e.to_string()))?;
    let foldable: Vec<usize> = (0..m.gos.n_vertices())
        .filter(|&v| matches!(m.gos.classify_vertex(v), VertexClass::Foldable { .. }))
        .collect();
    let folds = m.trace.iter().filter(|s| matches!(s, gos_core::gos::TraceStep::Fold { .. })).count();
    let sep = m.gos.separability();
    run.line(format!("complexity {:?}", m.complexity.0));
    run.line(format!("{folds} folds; {} vertices, {} edges", m.gos.n_vertices(), m.gos.n_edges()));
    run.line(format!("χ equality: {}; separable: {}", sep.chi_equal, sep.separable));
    let a = run.claim("minimized space is reduced", m.gos.is_reduced(), Method::Direct);
    let b = run.claim("every vertex is unfoldable", foldable.is_empty(), Method::Direct);
    let c = run.claim("fold search finished below its cap", !m.capped, Method::Direct);
    if sep.chi_equal {
        run.claim("χ equality implies separable", sep.separable, Method::Direct);
    }
    run.report.verdict = a && b && c && (!sep.chi_equal || sep.separable);
    let classes: Vec<String> = (0..m.gos.n_vertices()).map(|v| format!("{:?}", m.gos.classify_vertex(v))).collect();
    run.report.details = json!({"complexity": m.complexity, "trace": m.trace, "vertexClasses": classes, "separability": sep});
    run.dot("input.dot", &x.to_dot())?;
    run.dot("minimized.dot", &m.gos.to_dot())?;
    run.finish(1)
}

pub fn cylinders(file: &Option<PathBuf>, minimized: bool, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let mut run = Run::new("cylinders", Some(inst.kind()), o);
    let (mut x, norm) = space(inst, o)?;
    run.report.instance = Some(norm.to_file(seed));
    if minimized {
        x = x.minimize().map_err(|e| Failure::Internal(e.to_string()))?.gos;
    }
    let cyl = Cylinders::build(&x);
    let squares: usize = x.edge_graphs.iter().map(|g| g.n_edges()).sum();
    let ok = run.claim("annuli partition the squares", cyl.square_count() == squares, Method::Direct);
    run.line(format!(
        "{} annuli over {squares} squares; {} circles; {} cylinders",
        cyl.annuli.len(),
        cyl.circles.len(),
        cyl.cylinders.len()
    ));
    let mut table = Vec::new();
    for (i, c) in cyl.cylinders.iter().enumerate() {
        let circles: Vec<String> = c.circles.iter().map(|&k| describe_circle(&x, &cyl, k)).collect();
        let windings: Vec<usize> = cyl.attachments.iter().filter(|a| c.annuli.contains(&a.annulus)).map(|a| a.winding).collect();
        run.line(format!(
            "cylinder {i}: {}, circles [{}], windings {windings:?}, boundary {}",
            if c.good { "good" } else { "bad" },
            circles.join(", "),
            c.boundary.len()
        ));
        table.push(json!({
            "good": c.good,
            "annuli": c.annuli,
            "circles": circles,
            "circleLengths": c.circles.iter().map(|&k| cyl.circles[k].darts.len()).collect::<Vec<_>>(),
            "windings": windings,
            "boundary": c.boundary,
            "essential": c.essential,
            "meets": c.min_meets(),
        }));
    }
    run.report.details = json!({"squares": squares, "cylinders": table});
    run.report.verdict = ok;
    run.dot("squares.dot", &cyl.to_dot())?;
    run.finish(1)
}

pub fn split(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let mut run = Run::new("split", Some(inst.kind()), o);
    let (x, norm) = space(inst, o)?;
    run.report.instance = Some(norm.to_file(seed));
    let m = x.minimize().map_err(|e| Failure::Internal(e.to_string()))?;
    let s = split_to_bad(&m.gos).map_err(|e| Failure::Internal(e.to_string()))?;
    let ok = run.claim(
        "every component has a bad cylinder or χ(Γ_U) = 0",
        every_component_has_bad_cylinder(&s.gos),
        Method::Direct,
    );
    run.line(format!("{} splitting moves", s.trace.len()));
    let cyl = Cylinders::build(&s.gos);
    let bad = cyl.cylinders.iter().filter(|c| !c.good).count();
    run.line(format!("{bad} of {} cylinders bad", cyl.cylinders.len()));
    run.report.details = json!({"moves": s.trace, "cylindersGood": cyl.cylinders.iter().map(|c| c.good).collect::<Vec<_>>()});
    run.report.verdict = ok;
    run.dot("split.dot", &s.gos.to_dot())?;
    run.finish(1)
}

pub fn theorem(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let Instance::AdjoinRoot { data, hom } = inst else {
        return Err(Failure::Precondition("theorem needs an adjoin-root instance".into()));
    };
    let mut run = Run::new("theorem", Some(Kind::AdjoinRoot), o);
    let r = theorem_report(&data, hom, o.max_length.unwrap_or(DEFAULT_MAX_LENGTH), o.parallel > 1).map_err(report_failure)?;
    let parse = |v: &[String]| v.iter().map(|s| Word::parse(s, data.rank).map(|w| w.0)).collect::<Result<Vec<_>, _>>();
    let hom = parse(&r.base_images)
        .and_then(|b| parse(&r.root_images).map(|rt| (b, rt)))
        .map_err(|e| Failure::Internal(e.to_string()))?;
    run.report.instance = Some(Instance::AdjoinRoot { data, hom: Some(hom) }.to_file(seed));
    run.report.summary = r.summary.clone();
    run.report.claims = r.claims.clone();
    run.report.verdict = r.verdict;
    run.report.details = serde_json::to_value(&r).expect("reports serialize");
    run.finish(1)
}

pub fn corollary(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let Instance::HnnConjugacy(d) = inst else {
        return Err(Failure::Precondition("corollary needs an hnn-conjugacy instance".into()));
    };
    let mut run = Run::new("corollary", Some(Kind::HnnConjugacy), o);
    let r = corollary_report(&d).map_err(report_failure)?;
    run.report.instance = Some(Instance::HnnConjugacy(d).to_file(seed));
    run.report.summary = r.summary.clone();
    run.report.claims = r.claims.clone();
    run.report.verdict = r.verdict;
    run.report.details = serde_json::to_value(&r).expect("reports serialize");
    run.finish(1)
}

pub fn uot(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let Instance::UnionOfTrees(z) = inst else {
        return Err(Failure::Precondition("uot needs a union-of-trees instance".into()));
    };
    let mut run = Run::new("uot", Some(Kind::UnionOfTrees), o);
    run.report.instance = Some(Instance::UnionOfTrees(z.clone()).to_file(seed));
    z.validate().map_err(|e| Failure::Precondition(e.to_string()))?;
    let d = uot::deltas(&z);
    let kb = uot::kappa_balance(&z);
    run.line(format!(
        "class {:?}; Δ_q^- = {}, Δ_q^+ = {}, Δ_p^- = {}, Δ_p^+ = {}",
        d.class, d.q_minus, d.q_plus, d.p_minus, d.p_plus
    ));
    run.line(format!("κ balance: {} = {}", kb.lhs, kb.rhs));
    let mut ok = run.claim("κ(Z̄) - Σκ(S) = Δ_q^+ - Δ_q^-", kb.holds, Method::Direct);
    if let Some(p) = kb.p_bound {
        ok &= run.claim("Δ_p^- ≥ 2Δ_q^+", p, Method::Direct);
    }
    if d.z2_flag {
        run.line("Z̄ has fundamental group of order two");
    }
    let product = uot::try_product_decomposition(&z).ok();
    let mut leaf = None;
    if let Some(p) = &product {
        run.line(format!("product of {} bands", p.bands.len()));
        ok &= run.claim(
            "the product decomposition reassembles Z",
            uot::same_union(&z, &uot::reassemble(&z.trees, p)),
            Method::Direct,
        );
        if z.y_count() == 0 {
            match uot::leaf_space(&z) {
                Ok(l) => {
                    run.line(format!(
                        "leaf space: {} vertices, tree {}, κ {} against {}",
                        l.graph.n_vertices, l.is_tree, l.kappa, l.kappa_z
                    ));
                    ok &= run.claim("leaf space is a tree with κ(Γ_Z) = κ(Z)", l.all_hold(), Method::Direct);
                    leaf = Some(l);
                }
                Err(e) => run.line(format!("no leaf space: {e}")),
            }
        }
    } else {
        run.line("not a product");
    }
    if z.y_count() == 0 {
        ok &= run.claim(
            "Δ_q^- = 0 exactly when Z is a product",
            (d.q_minus == uot::Half::ZERO) == product.is_some(),
            Method::Direct,
        );
    }
    run.report.verdict = ok;
    run.report.details = json!({"deltas": d, "kappaBalance": kb, "product": product, "leafSpace": leaf, "exhaustion": uot::exhaustion(&z)});
    run.dot("union.dot", &union_to_dot(&z))?;
    run.finish(1)
}

pub fn primitive(word: &str, rank: usize, o: &Opts) -> Outcome {
    let w = Word::parse(word, rank).map_err(|e| Failure::Parse(e.to_string()))?.0;
    if gos_core::words::cyclic_reduce(&w).is_empty() {
        return Err(Failure::Precondition("the trivial word has no primitivity".into()));
    }
    let mut run = Run::new("primitive", None, o);
    let m = whitehead_minimize(&w, rank);
    run.line(if m.length == 1 {
        "primitive".to_string()
    } else {
        format!("not primitive, minimal length {}", m.length)
    });
    if w.len() <= 8 && rank <= 3 {
        let brute = oracle::brute_min_length(&w, rank);
        run.report.verdict = run.claim("exhaustive orbit search finds the same minimum", brute == m.length, Method::Exhaustive);
    }
    run.report.details = json!({"word": text(&w), "rank": rank, "minimalLength": m.length, "minimalWord": text(&m.word), "sequence": m.sequence});
    run.finish(1)
}

pub fn corank_search(file: &Option<PathBuf>, o: &Opts) -> Outcome {
    let (inst, seed) = load(file)?;
    let Instance::AdjoinRoot { data, hom } = inst else {
        return Err(Failure::Precondition("corank-search needs an adjoin-root instance".into()));
    };
    let mut run = Run::new("corank-search", Some(Kind::AdjoinRoot), o);
    run.report.instance = Some(Instance::AdjoinRoot { data: data.clone(), hom }.to_file(seed));
    let p = data.presentation();
    let max = o.max_length.unwrap_or(2);
    let found = bounded_corank_search(&p, data.rank, max, o.parallel > 1);
    let relators: Vec<String> = p.relators.iter().map(|r| text(r)).collect();
    run.line(format!("presentation on {} generators, relators {}", p.generators, relators.join(", ")));
    match &found {
        Some(w) => {
            let images: Vec<String> = w
                .iter()
                .enumerate()
                .map(|(i, im)| format!("{} ↦ {}", letter_char(i as i32 + 1), text(im)))
                .collect();
            run.line(format!("witness: {}", images.join(", ")));
            run.report.verdict = run.claim("witness kills the relators and is onto", p.is_witness(w, data.rank), Method::Direct);
        }
        None => run.line(format!("none up to length {max}")),
    }
    run.report.details = json!({"maxLength": max, "rank": data.rank, "witness": found.map(|w| w.iter().map(|x| text(x)).collect::<Vec<_>>())});
    run.finish(1)
}

pub fn gen(kind: &str, o: &Opts) -> Outcome {
    let k = Kind::parse(kind).ok_or_else(|| Failure::Parse(format!("unknown kind {kind}")))?;
    let f = generate(k, o.seed.unwrap_or(0)).ok_or_else(|| Failure::Precondition(format!("no generator for {kind}")))?;
    let body = serde_json::to_string_pretty(&f).expect("instances serialize") + "\n";
    match o.json.as_deref() {
        Some(p) if p != Path::new("-") => fs::write(p, body).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?,
        _ => print!("{body}"),
    }
    Ok(0)
}

pub fn oracle(modules: &[String], fault: Option<&str>, o: &Opts) -> Outcome {
    let modules = modules
        .iter()
        .map(|m| Module::parse(m).ok_or_else(|| Failure::Parse(format!("unknown module {m}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let fault = match fault {
        None => None,
        Some("mutated-fold") => Some(Fault::MutatedFold),
        Some(f) => return Err(Failure::Parse(format!("unknown fault {f}"))),
    };
    let mut run = Run::new("oracle", None, o);
    let rows = oracle::oracle_suite(&Corpus::standard(), &Scope { modules, fault });
    for r in &rows {
        run.line(r.to_string());
    }
    run.report.verdict = rows.iter().all(|r| r.passed());
    run.report.details = json!({"rows": rows});
    run.finish(1)
}
