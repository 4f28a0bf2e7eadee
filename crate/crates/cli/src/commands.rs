use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use polar_harq::construction::PatternFile;
use polar_harq::sim::{render_curve, substream};
use polar_harq::{
    check_equivalence_bec, enumerate_channel_equivalence, make_rv_plan, puncture_fixed_eps, puncture_frozen_based,
    puncture_greedy, puncture_symmetric, run_bler, run_harq_experiment, Algorithm, BlerPoint, CodeIndex, GreedyOutcome,
    MotherCode, Transmission,
};
use rand::seq::index::sample;
use rand::Rng;

use crate::config::{ExperimentConfig, SubsetSpec};
use crate::output::{emit, Staged};

pub fn design(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<()> {
    let spec = cfg.mother()?;
    let mother = spec.build()?;
    let mut text = format!(
        "{} {} {} {}\n",
        mother.len(),
        mother.k(),
        mother.crc_len(),
        mother.design_eps()
    );
    for i in mother.non_frozen() {
        let _ = writeln!(text, "{i}");
    }
    emit(out, &text)
}

fn construct(mother: &MotherCode, spec: &SubsetSpec) -> Result<GreedyOutcome> {
    let offset = |x: usize| CodeIndex::new(x, mother.len()).map_err(anyhow::Error::from);
    let outcome = match spec.algorithm {
        Algorithm::Greedy => puncture_greedy(mother, spec.m)?,
        Algorithm::Symmetric => {
            let x = spec.x.ok_or_else(|| anyhow!("symmetric construction needs subset.x"))?;
            puncture_symmetric(mother, spec.m, offset(x)?)?
        }
        Algorithm::FixedEps => puncture_fixed_eps(mother, spec.m, spec.eps)?,
        Algorithm::Frozen => puncture_frozen_based(mother, spec.m)?,
    };
    if outcome.saturated {
        eprintln!("warning: ε reached its floor without meeting the target estimate");
    }
    Ok(outcome)
}

fn prefixes_disjoint(outcome: &GreedyOutcome, x: CodeIndex) -> Result<bool> {
    let p = &outcome.pattern;
    for j in 0..=p.len() {
        let prefix = p.prefix(j);
        let shifted = prefix.translate(x)?;
        if prefix.indices().iter().any(|&i| shifted.contains(i)) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn puncture(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<()> {
    let mother = cfg.mother()?.build()?;
    let spec = cfg.subset.as_ref().ok_or_else(|| anyhow!("subset.m is required"))?;
    let outcome = construct(&mother, spec)?;
    let mut text = PatternFile::from_outcome(&mother, &outcome).render();
    if spec.algorithm == Algorithm::Symmetric {
        let x = CodeIndex::new(spec.x.expect("validated"), mother.len())?;
        if !prefixes_disjoint(&outcome, x)? {
            bail!("symmetric pattern overlaps its translate");
        }
        let header_end = text.find('\n').expect("header line") + 1;
        text.insert_str(header_end, "# disjoint=true\n");
        if out.is_some() {
            println!("disjoint=true");
        }
    }
    emit(out, &text)
}

fn code_desc(mother: &MotherCode, m: usize) -> String {
    format!("({}>={},{}+{})", mother.len(), m, mother.k(), mother.crc_len())
}

pub fn simulate(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<()> {
    let snr = cfg.snr()?;
    let mother = cfg.mother()?.build()?;
    let mut comments = cfg.resolved.clone();
    let tx = if let Some(path) = &cfg.pattern_file {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file = PatternFile::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        if file.block_len != mother.len() || file.k != mother.k() || file.crc_len != mother.crc_len() {
            bail!(
                "pattern file is for N={} K={} crc_len={}, config says N={} K={} crc_len={}",
                file.block_len,
                file.k,
                file.crc_len,
                mother.len(),
                mother.k(),
                mother.crc_len()
            );
        }
        Transmission::single(file.pattern.subset_code())
    } else if let Some(spec) = &cfg.subset {
        let outcome = construct(&mother, spec)?;
        comments.push(format!("eps_final={}", outcome.eps_final));
        Transmission::single(outcome.pattern.subset_code())
    } else {
        Transmission::mother(&mother)
    };
    let points = run_bler(&mother, &tx, &cfg.decoder, snr, &cfg.policy, cfg.seed)?;
    let csv = render_curve(
        &code_desc(&mother, tx.channel_bits()),
        cfg.decoder.list_size,
        cfg.seed,
        &comments,
        &points,
    );
    emit(out, &csv)
}

pub fn harq(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<()> {
    let snr = cfg.snr()?;
    let mother = cfg.mother()?.build()?;
    let spec = cfg.subset.as_ref().ok_or_else(|| anyhow!("subset.m is required"))?;
    let x = CodeIndex::new(spec.x.unwrap_or(mother.len()), mother.len())?;
    let extra = spec
        .extra_offsets
        .iter()
        .map(|&y| CodeIndex::new(y, mother.len()))
        .collect::<polar_harq::Result<Vec<_>>>()?;
    let (plan, outcome) = make_rv_plan(&mother, spec.m, x, &extra)?;
    let curves = run_harq_experiment(&mother, &plan, &cfg.decoder, snr, &cfg.policy, cfg.seed)?;

    let mut comments = cfg.resolved.clone();
    comments.push(format!("eps_final={}", outcome.eps_final));
    let offsets: Vec<String> = plan.offsets().iter().map(|o| o.to_string()).collect();
    comments.push(format!("rv_offsets={}", offsets.join(",")));
    let render = |name: &str, bits: usize, pts: &[BlerPoint]| {
        let mut c = comments.clone();
        c.push(format!("curve={name}"));
        render_curve(&code_desc(&mother, bits), cfg.decoder.list_size, cfg.seed, &c, pts)
    };
    let files = [
        ("rv0", render("rv0", spec.m, &curves.rv0)),
        ("rv1", render("rv1", spec.m, &curves.rv1)),
        ("joint", render("joint", 2 * spec.m, &curves.joint)),
    ];
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let mut staged = Staged::default();
            for (name, text) in &files {
                staged.add(&dir.join(format!("{name}.csv")), text)?;
            }
            staged.commit()
        }
        None => {
            let all: Vec<&str> = files.iter().map(|(_, t)| t.as_str()).collect();
            emit(None, &all.join("\n"))
        }
    }
}

/// Returns whether every check passed.
pub fn equiv_check(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<bool> {
    let eq = &cfg.equiv;
    let mut cases: Vec<(usize, Vec<CodeIndex>, CodeIndex, f64)> = Vec::new();
    if let Some((n, subset, x)) = &eq.single {
        let s = polar_harq::indices(subset, *n)?;
        let x = CodeIndex::new(*x, *n)?;
        for &e in &eq.eps {
            cases.push((*n, s.clone(), x, e));
        }
    } else {
        let sizes: Vec<usize> = (1..).map(|p| 1usize << p).take_while(|&n| n <= eq.max_n).collect();
        for i in 0..eq.points {
            let mut rng = substream(cfg.seed, 0, i as u64);
            let n = sizes[rng.random_range(0..sizes.len())];
            let size = rng.random_range(n / 2..=n);
            let s: Vec<CodeIndex> = sample(&mut rng, n, size)
                .into_iter()
                .map(CodeIndex::from_zero_based)
                .collect();
            let x = CodeIndex::from_zero_based(rng.random_range(0..n));
            cases.push((n, s, x, eq.eps[i % eq.eps.len()]));
        }
    }

    let mut text = String::new();
    let mut all_pass = true;
    for (n, s, x, e) in &cases {
        let mut report = check_equivalence_bec(s, *x, *e, *n)?;
        if eq.exhaustive && *n <= 4 {
            report.passed &= enumerate_channel_equivalence(*n, s, *x, *e)?;
        }
        all_pass &= report.passed;
        let _ = writeln!(text, "{report}");
    }
    emit(out, &text)?;
    Ok(all_pass)
}
