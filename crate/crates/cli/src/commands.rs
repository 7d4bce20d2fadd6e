use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sbox_forge::boolfn::{class_sizes, nonaffine_permutation_bounds};
use sbox_forge::construct::{
    binomial_table, coefficient_search, repair, BinomialParams, RepairOutcome, RepairStrategy, SearchReport,
};
use sbox_forge::gf2n::default_poly;
use sbox_forge::metrics;
use sbox_forge::powermap::{self, Bijectivity, SurveyFilter};
use sbox_forge::{Error, FieldElement, FieldSpec};

use crate::args::{AnalyzeArgs, ConstructArgs, CountArgs, FieldArgs, RepairArgs, SearchArgs, SurveyArgs};
use crate::error::CliError;
use crate::report::{
    ranked_entry, scientific, target_block, ClassEntry, CountBlock, InputDigest, Metrics, Outcome, Report,
    SearchBlock, SurveyBlock, Tables, MAX_LISTED_TIES,
};
use crate::sbox_file::{Format, SboxFile};

/// Survey sizes accepted by `survey`.
pub const SURVEY_N: std::ops::RangeInclusive<u32> = 3..=12;
/// Class sizes are exact integers; 2^16! already has ~287k digits.
pub const COUNT_N: std::ops::RangeInclusive<u32> = 1..=16;
/// Strong S-box bar reported alongside the target.
pub const STRONG: (u32, u32) = (10, 100);

/// Hex with a 0x prefix, otherwise decimal.
pub fn parse_int(s: &str, what: &str) -> Result<u64, CliError> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("{what}: '{s}' is not an integer")))
}

fn parse_pair(s: &str, what: &str) -> Result<(u64, u64), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("{what}: expected two comma-separated values, got '{s}'")))?;
    Ok((parse_int(a, what)?, parse_int(b, what)?))
}

fn parse_poly(s: &str) -> Result<u32, CliError> {
    u32::try_from(parse_int(s, "--poly")?).map_err(|_| CliError::Usage(format!("--poly {s} is too large")))
}

fn poly_degree(p: u32) -> u32 {
    31u32.saturating_sub(p.leading_zeros())
}

/// The field fixed by --poly, or the default polynomial of --n (8 if absent).
pub fn resolve_field(field: &FieldArgs) -> Result<FieldSpec, CliError> {
    match (&field.poly, field.n) {
        (Some(p), n) => {
            let poly = parse_poly(p)?;
            let degree = poly_degree(poly);
            if n.is_some_and(|n| n != degree) {
                return Err(CliError::Usage(format!(
                    "--poly {poly:#x} has degree {degree} but --n is {}",
                    n.unwrap()
                )));
            }
            Ok(FieldSpec::new(degree, poly)?)
        }
        (None, n) => Ok(FieldSpec::with_default_poly(n.unwrap_or(8))?),
    }
}

fn field_name(spec: &FieldSpec) -> String {
    format!("GF(2^{})/{:#x}", spec.n(), spec.poly())
}

fn parse_strategy(r: &RepairArgs) -> Result<RepairStrategy, CliError> {
    let strategy: RepairStrategy = r.strategy.parse().map_err(CliError::Usage)?;
    match (strategy, r.budget) {
        (RepairStrategy::Greedy, Some(_)) => Err(CliError::Usage("--budget applies to the anneal strategy only".into())),
        (RepairStrategy::Anneal { .. }, Some(budget)) => Ok(RepairStrategy::Anneal { budget }),
        (s, None) => Ok(s),
    }
}

fn coefficient(s: &str, what: &str, spec: &FieldSpec) -> Result<FieldElement, CliError> {
    let v = parse_int(s, what)?;
    if v >= spec.size() as u64 {
        return Err(CliError::Usage(format!("{what} {s} is not an element of {}", field_name(spec))));
    }
    Ok(FieldElement(v as u16))
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    writeln!(out, "{key:<14}{value}").unwrap();
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a (n != m)",
    }
}

fn metrics_lines(out: &mut String, m: &Metrics) {
    line(out, "du", m.du);
    line(out, "nl", m.nl);
    line(out, "degree", m.degree);
    line(out, "bijective", yes_no(m.bijective));
    line(out, "image size", m.image_size);
    line(out, "fixed points", m.fixed_points);
}

fn write_sbox(path: &Path, format: Format, f: &sbox_forge::VectorialFunction) -> Result<(), CliError> {
    let bytes = SboxFile::from_function(f).encode(format, path)?;
    std::fs::write(path, bytes).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

pub fn analyze(a: &AnalyzeArgs) -> Result<String, CliError> {
    let (file, bytes) = SboxFile::read(&a.path, a.format, a.m)?;
    let poly = match &a.poly {
        Some(p) => FieldSpec::new(file.n, parse_poly(p)?)?.poly(),
        None => default_poly(file.n),
    };
    let f = file.to_function();
    let metrics = Metrics::from(metrics::summarize(&f));
    let ddt = a.ddt.then(|| metrics::ddt(&f)).transpose()?;
    let walsh = a.walsh.then(|| metrics::walsh(&f)).transpose()?;

    let mut report = Report::new(Some(poly));
    report.input = Some(InputDigest::of_bytes(a.path.display().to_string(), &bytes));
    report.metrics = Some(metrics);
    if a.ddt || a.walsh {
        report.tables = Some(Tables::from_parts(ddt.as_ref(), walsh.as_ref()));
    }
    if a.json {
        return Ok(report.to_json());
    }

    let mut out = String::new();
    line(&mut out, "input", a.path.display());
    line(&mut out, "sha256", &report.input.as_ref().unwrap().sha256);
    line(&mut out, "size", format!("{} -> {} bits", file.n, file.m));
    metrics_lines(&mut out, &metrics);
    if let Some(t) = &ddt {
        out.push_str("\nddt (row = input difference a, column = output difference b)\n");
        for row in t.rows() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
    }
    if let Some(t) = &walsh {
        out.push_str("\nwalsh (row = output mask b, column = input mask a)\n");
        for row in t.rows() {
            let cells: Vec<String> = row.iter().map(i32::to_string).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
    }
    Ok(out)
}

pub fn survey(a: &SurveyArgs) -> Result<String, CliError> {
    if !SURVEY_N.contains(&a.n) {
        return Err(CliError::Usage(format!(
            "survey needs {} <= n <= {}, got {}",
            SURVEY_N.start(),
            SURVEY_N.end(),
            a.n
        )));
    }
    let spec = resolve_field(&FieldArgs {
        poly: a.poly.clone(),
        n: Some(a.n),
    })?;
    let (bijectivity, label) = match (a.bijective_only, a.non_bijective_only) {
        (true, _) => (Bijectivity::BijectiveOnly, "bijective"),
        (_, true) => (Bijectivity::NonBijectiveOnly, "non-bijective"),
        _ => (Bijectivity::Any, "any"),
    };
    let filter = SurveyFilter {
        du_max: a.du_max.unwrap_or(u32::MAX),
        nl_min: a.nl_min.unwrap_or(0),
        bijectivity,
    };
    let classes = powermap::survey(a.n, &spec, filter)?;
    let block = SurveyBlock {
        n: a.n,
        du_max: a.du_max,
        nl_min: a.nl_min,
        bijectivity: label,
        exponents: classes.iter().map(|c| c.members.len()).sum(),
        classes: classes.iter().map(ClassEntry::from).collect(),
    };
    if a.json {
        let mut report = Report::new(Some(spec.poly()));
        report.survey = Some(block);
        return Ok(report.to_json());
    }

    let mut out = String::new();
    writeln!(
        out,
        "power maps x^d over {}: {} cosets, {} exponents",
        field_name(&spec),
        block.classes.len(),
        block.exponents
    )
    .unwrap();
    writeln!(out, "{:>6} {:>5} {:>5} {:>5} {:>4}  members", "rep", "q", "du", "nl", "bij").unwrap();
    for c in &block.classes {
        let members: Vec<String> = c.members.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{:>6} {:>5} {:>5} {:>5} {:>4}  {}",
            c.representative,
            c.q,
            c.du,
            c.nl,
            if c.bijective { "yes" } else { "no" },
            members.join(" ")
        )
        .unwrap();
    }
    Ok(out)
}

pub fn count(a: &CountArgs) -> Result<String, CliError> {
    let m = a.m.unwrap_or(a.n);
    for (name, v) in [("n", a.n), ("m", m)] {
        if !COUNT_N.contains(&v) {
            return Err(CliError::Usage(format!(
                "count needs {} <= {name} <= {}, got {v}",
                COUNT_N.start(),
                COUNT_N.end()
            )));
        }
    }
    let sizes = class_sizes(a.n, m);
    let (mu, n_mu) = nonaffine_permutation_bounds(a.n);
    let values = [
        ("bf", &sizes.bf),
        ("bt", &sizes.bt),
        ("bp", &sizes.bp),
        ("mu", &mu),
        ("n_mu", &n_mu),
    ];
    let approx: BTreeMap<&'static str, String> = values.iter().map(|(k, v)| (*k, scientific(v))).collect();
    if a.json {
        let mut report = Report::new(None);
        report.count = Some(CountBlock {
            n: a.n,
            m,
            bf: sizes.bf.to_string(),
            bt: sizes.bt.to_string(),
            bp: sizes.bp.to_string(),
            mu: mu.to_string(),
            n_mu: n_mu.to_string(),
            approx,
        });
        return Ok(report.to_json());
    }

    let labels = [
        format!("|BF({}, {m})|", a.n),
        format!("|BT({})|", a.n),
        format!("|BP({})|", a.n),
        format!("mu({})", a.n),
        format!("{}*mu({})", a.n, a.n),
    ];
    let mut out = String::new();
    for (label, (key, v)) in labels.iter().zip(values) {
        writeln!(out, "{label:<14}~ {:<12}{v}", approx[key]).unwrap();
    }
    writeln!(out, "non-affine permutations lie in [mu({0}), {0}*mu({0})]", a.n).unwrap();
    Ok(out)
}

fn binomial_label(p: &BinomialParams) -> String {
    format!(
        "{:#04x}*x^{} + {:#04x}*x^{}",
        p.alpha.value(),
        p.d,
        p.beta.value(),
        p.linear_exponent()
    )
}

fn params_string(spec: &FieldSpec, d: u64, i: u32, extra: &str, strategy: RepairStrategy, seed: u64) -> String {
    let budget = match strategy {
        RepairStrategy::Anneal { budget } => format!(" budget={budget}"),
        RepairStrategy::Greedy => String::new(),
    };
    format!(
        "poly={:#x} d={d} i={i}{extra} strategy={strategy}{budget} seed={seed}",
        spec.poly()
    )
}

fn strategy_line(o: &RepairOutcome) -> String {
    match (o.strategy.budget, o.strategy.proposals) {
        (Some(b), Some(p)) => format!("{} (seed {}, {p} of {b} proposals)", o.strategy.name, o.strategy.seed),
        _ => format!("{} (seed {})", o.strategy.name, o.strategy.seed),
    }
}

pub fn construct(a: &ConstructArgs) -> Result<String, CliError> {
    let spec = resolve_field(&a.field)?;
    let strategy = parse_strategy(&a.repair)?;
    let alpha = coefficient(&a.alpha, "--alpha", &spec)?;
    let beta = coefficient(&a.beta, "--beta", &spec)?;
    let p = BinomialParams::new(&spec, a.repair.d, a.repair.i, alpha, beta)?;
    let table = binomial_table(&p);
    let seed = a.repair.seed;
    let mut outcome = match repair(&table, strategy, seed) {
        Err(Error::AlreadyBijective) => RepairOutcome::unchanged(table, strategy, seed),
        other => other?,
    };
    outcome.base = Some(p.clone());
    if let Some(path) = &a.out {
        write_sbox(path, a.format, &outcome.sbox)?;
    }

    let metrics = Metrics::from(metrics::summarize(&outcome.sbox));
    let extra = format!(" alpha={:#x} beta={:#x}", alpha.value(), beta.value());
    let mut report = Report::new(Some(spec.poly()));
    report.input = Some(InputDigest::of_params(params_string(&spec, p.d, p.i, &extra, strategy, seed)));
    report.metrics = Some(metrics);
    report.outcome = Some(Outcome::from(&outcome));
    if a.json {
        return Ok(report.to_json());
    }

    let mut out = String::new();
    line(&mut out, "binomial", format!("{} over {}", binomial_label(&p), field_name(&spec)));
    line(&mut out, "base image", format!("{} of {}", outcome.base_image_size, spec.size()));
    line(&mut out, "strategy", strategy_line(&outcome));
    line(&mut out, "reassigned", outcome.reassignments.len());
    metrics_lines(&mut out, &metrics);
    if let Some(path) = &a.out {
        line(&mut out, "wrote", path.display());
    }
    Ok(out)
}

fn find_pair(report: &SearchReport, alpha: u64, beta: u64) -> Option<(usize, &RepairOutcome)> {
    report.ranked.iter().enumerate().find(|(_, o)| {
        o.base
            .as_ref()
            .is_some_and(|p| p.alpha.value() as u64 == alpha && p.beta.value() as u64 == beta)
    })
}

pub fn search(a: &SearchArgs) -> Result<String, CliError> {
    let spec = resolve_field(&a.field)?;
    let strategy = parse_strategy(&a.repair)?;
    let (target_du, target_nl) = parse_pair(&a.target, "--target")?;
    let watch = a
        .watch
        .iter()
        .map(|w| parse_pair(w, "--watch"))
        .collect::<Result<Vec<_>, _>>()?;
    let (d, i, seed) = (a.repair.d, a.repair.i, a.repair.seed);
    let report = coefficient_search(d, i, &spec, strategy, seed)?;
    let best = report.best().ok_or_else(|| CliError::Internal("search produced no candidates".into()))?;
    if let Some(path) = &a.out {
        write_sbox(path, a.format, &best.sbox)?;
    }

    let ties = report.ties_at_best();
    let mut watched = Vec::new();
    for &(alpha, beta) in &watch {
        let (rank, o) = find_pair(&report, alpha, beta).ok_or_else(|| {
            CliError::Usage(format!("--watch {alpha},{beta} is not a searched pair (alpha must be nonzero and in the field)"))
        })?;
        watched.push(ranked_entry(rank + 1, o));
    }
    let block = SearchBlock {
        n: spec.n(),
        d,
        i,
        strategy: strategy.name(),
        seed,
        budget: match strategy {
            RepairStrategy::Anneal { budget } => Some(budget),
            RepairStrategy::Greedy => None,
        },
        candidates: report.ranked.len(),
        binomial_image_sizes: report
            .binomial_image_sizes
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        best: Some(ranked_entry(1, best)),
        ties_at_best: ties.len(),
        tied_pairs: ties
            .iter()
            .take(MAX_LISTED_TIES)
            .map(|o| {
                let p = o.base.as_ref().expect("search outcomes carry their parameters");
                [p.alpha.value(), p.beta.value()]
            })
            .collect(),
        target: target_block(&report, target_du as u32, target_nl as u32),
        strong: target_block(&report, STRONG.0, STRONG.1),
        top: report
            .ranked
            .iter()
            .take(a.top)
            .enumerate()
            .map(|(k, o)| ranked_entry(k + 1, o))
            .collect(),
        watched,
    };
    let metrics = Metrics::from(metrics::summarize(&best.sbox));
    if a.json {
        let mut r = Report::new(Some(spec.poly()));
        r.input = Some(InputDigest::of_params(params_string(&spec, d, i, "", strategy, seed)));
        r.metrics = Some(metrics);
        r.outcome = Some(Outcome::from(best));
        r.search = Some(block);
        return Ok(r.to_json());
    }

    let mut out = String::new();
    writeln!(
        out,
        "search alpha*x^{d} + beta*x^{} over {}, strategy {strategy}, seed {seed}",
        1u64 << i,
        field_name(&spec)
    )
    .unwrap();
    let sizes: Vec<String> = block
        .binomial_image_sizes
        .iter()
        .map(|(k, v)| format!("{k} ({v})"))
        .collect();
    writeln!(out, "candidates: {}; binomial image sizes (beta != 0): {}", block.candidates, sizes.join(", ")).unwrap();
    writeln!(out, "{:>6} {:>6} {:>6} {:>4} {:>4}", "rank", "alpha", "beta", "du", "nl").unwrap();
    for e in &block.top {
        writeln!(
            out,
            "{:>6} {:>6} {:>6} {:>4} {:>4}{}",
            e.rank,
            format!("{:#04x}", e.alpha),
            format!("{:#04x}", e.beta),
            e.du,
            e.nl,
            if e.degenerate { "  (beta = 0)" } else { "" }
        )
        .unwrap();
    }
    for e in &block.watched {
        writeln!(
            out,
            "watched ({}, {}): rank {}, (du, nl) = ({}, {})",
            e.alpha, e.beta, e.rank, e.du, e.nl
        )
        .unwrap();
    }
    writeln!(
        out,
        "best (du, nl) = ({}, {}); {} candidates tie at best{}",
        best.du,
        best.nl,
        ties.len(),
        if ties.len() == 3 { " (exactly three)" } else { "" }
    )
    .unwrap();
    writeln!(
        out,
        "target (du <= {}, nl >= {}): {} ({} candidates); strong (du <= {}, nl >= {}): {} candidates",
        block.target.du,
        block.target.nl,
        if block.target.met { "met" } else { "not met" },
        block.target.count,
        STRONG.0,
        STRONG.1,
        block.strong.count
    )
    .unwrap();
    if let Some(path) = &a.out {
        writeln!(out, "wrote best S-box to {}", path.display()).unwrap();
    }
    Ok(out)
}
