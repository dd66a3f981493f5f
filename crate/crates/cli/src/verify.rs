//! The `verify` subcommand: each target turns into a list of named checks.

use anonhard::abp::{
    self, build_3abp_instance, build_type_a, verify_distance_catalog, virtual_costs, DistanceBound,
    DISTANCE_CASES,
};
use anonhard::ap8::{
    self, build_4ap8_instance, build_black, build_red, verify_locality, verify_pairwise_locality,
};
use anonhard::graphs::exact_vertex_cover;
use anonhard::random::{random_cover, random_partition};
use anonhard::{CubicGraph, VerificationReport};
use anyhow::bail;
use clap::ValueEnum;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Built, Reduction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// Pairwise distance cases of the binary reduction.
    Distances,
    /// Locality of cheap clusters in the 8-column reduction.
    Locality,
    /// Per-gadget costs of canonical solutions.
    CanonicalCosts,
    /// Random covers through solution and back, and canonicalization of
    /// random feasible solutions.
    Roundtrip,
    /// Minimum cover, canonical solution, cost formula and reverse extraction.
    Theorem,
}

/// Runs `target` for the given reduction, or for both when `reduction` is
/// `None` and the target applies to both.
pub fn run(
    target: Target,
    reduction: Option<Reduction>,
    g: &CubicGraph,
    seed: u64,
    trials: usize,
) -> anyhow::Result<VerificationReport> {
    let reductions: Vec<Reduction> = match (target, reduction) {
        (Target::Distances, None | Some(Reduction::Abp)) => vec![Reduction::Abp],
        (Target::Distances, Some(Reduction::Ap8)) => {
            bail!("distances applies to the 3abp reduction")
        }
        (Target::Locality, None | Some(Reduction::Ap8)) => vec![Reduction::Ap8],
        (Target::Locality, Some(Reduction::Abp)) => bail!("locality applies to the 4ap8 reduction"),
        (_, Some(r)) => vec![r],
        (_, None) => vec![Reduction::Abp, Reduction::Ap8],
    };
    let mut report = VerificationReport::new(format!(
        "verify {} on a cubic graph with n = {}, m = {} (seed {seed}, trials {trials})",
        target.to_possible_value().unwrap().get_name(),
        g.n(),
        g.m()
    ));
    let mut fingerprints = Vec::new();
    for r in reductions {
        let built = Built::new(r, g);
        let mut part = VerificationReport::new("");
        match target {
            Target::Distances => distances(&mut part, g),
            Target::Locality => locality(&mut part, g, seed, trials),
            Target::CanonicalCosts => canonical_costs(&mut part, &built, g),
            Target::Roundtrip => roundtrip(&mut part, &built, g, seed, trials),
            Target::Theorem => theorem(&mut part, &built, g),
        }
        let prefix = match r {
            Reduction::Abp => "3abp ",
            Reduction::Ap8 => "4ap8 ",
        };
        fingerprints.push(format!("{prefix}{}", built.fingerprint()));
        report.absorb(prefix, part);
    }
    Ok(report.with_fingerprint(fingerprints.join(", ")))
}

fn distances(report: &mut VerificationReport, g: &CubicGraph) {
    let inst = build_3abp_instance(g);
    let cat = verify_distance_catalog(&inst).expect("provenance built alongside rows");
    for (tally, (_, what, _)) in cat.cases.iter().zip(DISTANCE_CASES) {
        let expected = match tally.bound {
            DistanceBound::Exactly(d) => format!("={d}"),
            DistanceBound::AtLeast(d) => format!(">={d}"),
        };
        let observed = match (tally.min, tally.max) {
            (Some(lo), Some(hi)) => format!("{lo}..{hi} over {} pairs", tally.pairs),
            _ => "no pairs".to_string(),
        };
        report.check(
            format!("case {:02} {what}", tally.case),
            expected,
            observed,
            tally.pairs > 0 && tally.violations == 0,
        );
    }
    let passing = report.checks.iter().filter(|c| c.pass).count();
    report.check(
        "distance cases passing",
        format!("{0}/{0}", DISTANCE_CASES.len()),
        format!("{passing}/{}", DISTANCE_CASES.len()),
        passing == DISTANCE_CASES.len(),
    );
    report.check(
        "parallel jolly rows",
        "=0",
        format!(
            "{} pairs, {} differ",
            cat.parallel_jolly_pairs, cat.parallel_jolly_violations
        ),
        cat.parallel_jolly_violations == 0,
    );
}

fn locality(report: &mut VerificationReport, g: &CubicGraph, seed: u64, trials: usize) {
    let inst = build_4ap8_instance(g);
    let scan = verify_pairwise_locality(&inst);
    report.check(
        "rows closer than 8 share a vertex neighbourhood",
        "0 violations",
        format!(
            "{} violations among {} close pairs",
            scan.violations.len(),
            scan.close_pairs
        ),
        scan.violations.is_empty(),
    );
    let cover = exact_vertex_cover(g);
    let p = ap8::vc_to_solution_4ap8(&inst, &cover).expect("exact cover is a cover");
    let r = verify_locality(&inst, &p).expect("canonical solutions are feasible");
    report.check(
        "canonical solution locality",
        "0 violations",
        format!(
            "{} cluster, {} row violations",
            r.cluster_violations.len(),
            r.row_violations.len()
        ),
        r.passed(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = inst.instance();
    let mut clean = 0;
    for _ in 0..trials {
        let s = table
            .normalize_cluster_sizes(&random_partition(table.len(), 4, 7, &mut rng))
            .expect("blocks have at least 4 rows");
        if verify_locality(&inst, &s).expect("feasible").passed() {
            clean += 1;
        }
    }
    report.expect_eq(
        "random feasible solutions without locality violations",
        trials,
        clean,
    );
}

fn canonical_costs(report: &mut VerificationReport, built: &Built, g: &CubicGraph) {
    let cover = exact_vertex_cover(g);
    match built {
        Built::Abp(inst) => {
            let table = inst.instance();
            let type_a: Vec<u64> = (0..g.n())
                .map(|i| {
                    build_type_a(inst, i)
                        .expect("gadget in range")
                        .iter()
                        .map(|c| table.cluster_cost(c).expect("valid cluster"))
                        .sum()
                })
                .collect();
            report.expect_eq("type a gadget cost", 81, summarize(&type_a));
            let p = abp::vc_to_solution_3abp(inst, &cover).expect("exact cover is a cover");
            let virt = virtual_costs(inst, &p).expect("valid clustering");
            let type_b: Vec<Ratio<u64>> = cover
                .vertices()
                .iter()
                .map(|&i| inst.gadget_rows(i).map(|r| virt[r]).sum())
                .collect();
            report.expect_eq("type b gadget row cost", 99, summarize(&type_b));
            let eg: Vec<Ratio<u64>> = (0..g.m()).map(|e| virt[inst.edge_gadget_row(e)]).collect();
            report.expect_eq("edge gadget virtual cost", 12, summarize(&eg));
        }
        Built::Ap8(inst) => {
            let table = inst.instance();
            let cost = |cs: Vec<Vec<usize>>| -> u64 {
                cs.iter()
                    .map(|c| table.cluster_cost(c).expect("valid"))
                    .sum()
            };
            let red: Vec<u64> = (0..g.n())
                .map(|v| cost(build_red(inst, v).expect("in range")))
                .collect();
            let none = vec![false; g.n()];
            let black: Vec<u64> = (0..g.n())
                .map(|v| cost(build_black(inst, v, &none).expect("no black neighbours")))
                .collect();
            report.expect_eq("red solution cost", 15, summarize(&red));
            report.expect_eq("black solution cost", 36, summarize(&black));
            let p = ap8::vc_to_solution_4ap8(inst, &cover).expect("exact cover is a cover");
            let filler = p.clusters().last().expect("filler is last");
            report.expect_eq(
                "filler cluster cost",
                8 * filler.len() as u64,
                table.cluster_cost(filler).expect("valid"),
            );
        }
    }
}

/// Renders a list of values as the single value they share, or their range.
fn summarize<T: Ord + Copy + std::fmt::Display>(values: &[T]) -> String {
    match (values.iter().min(), values.iter().max()) {
        (Some(lo), Some(hi)) if lo == hi => lo.to_string(),
        (Some(lo), Some(hi)) => format!("{lo}..{hi}"),
        _ => "none".into(),
    }
}

fn roundtrip(
    report: &mut VerificationReport,
    built: &Built,
    g: &CubicGraph,
    seed: u64,
    trials: usize,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = built.instance();
    let mut ok = 0;
    for _ in 0..trials {
        let cover = random_cover(g, &mut rng);
        let p = built
            .vc_to_solution(&cover)
            .expect("random covers are covers");
        let cost = table.clustering_cost(&p).expect("valid clustering");
        let back = built.solution_to_vc(&p);
        if cost == built.formula(g, cover.len()) && back.as_ref() == Ok(&cover) {
            ok += 1;
        }
    }
    report.expect_eq(
        "random covers matching cost formula and reverse cover",
        trials,
        ok,
    );

    let (min, max) = match built {
        Built::Abp(_) => (3, 5),
        Built::Ap8(_) => (4, 7),
    };
    let mut sound = 0;
    for _ in 0..trials {
        let s = table
            .normalize_cluster_sizes(&random_partition(table.len(), min, max, &mut rng))
            .expect("blocks have at least k rows");
        if let Ok(q) = built.canonicalize(&s) {
            let not_worse = table.clustering_cost(&q).expect("valid")
                <= table.clustering_cost(&s).expect("valid");
            if not_worse && built.is_canonical(&q) {
                sound += 1;
            }
        }
    }
    report.expect_eq(
        "random feasible solutions canonicalized without cost increase",
        trials,
        sound,
    );
}

fn theorem(report: &mut VerificationReport, built: &Built, g: &CubicGraph) {
    let cover = exact_vertex_cover(g);
    report.check(
        "minimum vertex cover",
        "exact search",
        cover.len(),
        cover.is_cover(g),
    );
    let p = built
        .vc_to_solution(&cover)
        .expect("exact cover is a cover");
    let table = built.instance();
    report.expect_eq(
        "canonical solution feasible",
        true,
        table.is_feasible(&p).expect("valid"),
    );
    report.expect_eq(
        "canonical solution recognized",
        true,
        built.is_canonical(&p),
    );
    let cost = table.clustering_cost(&p).expect("valid clustering");
    report.expect_eq("canonical cost", built.formula(g, cover.len()), cost);
    let back = built
        .solution_to_vc(&p)
        .map(|c| anonhard::io::write_cover_json(&c));
    report.expect_eq(
        "reverse cover",
        anonhard::io::write_cover_json(&cover),
        back.unwrap_or_else(|e| e.to_string()),
    );
}
