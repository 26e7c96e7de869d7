//! Exhaustive checks of the averaging argument for `F = {A + R : A ⊆ G}`.
//!
//! For every member `S` of `F` the verifier computes `Int_R(S)` and
//! `f(S) = -(G \ Int_R(S))` and checks:
//!
//! * `|S| + |f(S)| >= |G|` (`eq1`),
//! * `f(S) = (-(G \ S)) + R` (`eq2`),
//! * `N_R(Int_R(S)) = S` (`eq3`),
//! * `f` maps `F` into `F` injectively (`bijection`),
//!
//! and then the average bound `2 * Σ|S| >= |F| * |G|` and the existence of
//! an element in at least half of the members. All comparisons are exact.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{translate_family_bounded, SetFamily, DEFAULT_FAMILY_LIMIT};
use crate::group::GroupSpec;
use crate::subset::{f_map_alt, GSubset};

/// Default largest group order accepted by [`sweep`].
pub const DEFAULT_SWEEP_MAX_ORDER: usize = 12;

/// R values are enumerated as `u64` masks; anything near this is hopeless anyway.
const SWEEP_HARD_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Majority {
    pub element: usize,
    pub count: u64,
}

/// Which check a [`Witness`] refutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Eq1,
    Eq2,
    Eq3,
    Bijection,
    Average,
    Majority,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Check::Eq1 => "eq1",
            Check::Eq2 => "eq2",
            Check::Eq3 => "eq3",
            Check::Bijection => "bijection",
            Check::Average => "average",
            Check::Majority => "majority",
        };
        f.write_str(name)
    }
}

/// The first offending member for a failed check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub check: Check,
    /// `(S, f(S), Int_R(S))`; absent for the family-level checks.
    pub sets: Option<(GSubset, GSubset, GSubset)>,
}

impl Witness {
    /// Dumps the witness in the family file format.
    pub fn to_file_string(&self, group: &GroupSpec, r: &GSubset) -> String {
        let mut out = format!("# group: {group}\n# failed: {}\n# R: {r}\n", self.check);
        if let Some((s, fs, int)) = &self.sets {
            out.push_str("# S, f(S), Int_R(S)\n");
            out.push_str(&format!("{s}\n{fs}\n{int}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub group: GroupSpec,
    pub r_set: GSubset,
    pub family_size: u64,
    pub size_sum: u64,
    pub average_size: Ratio<u64>,
    /// min over `F` of `|S| + |f(S)| - |G|`.
    pub min_slack: i64,
    pub eq1_ok: bool,
    pub eq2_ok: bool,
    pub eq3_ok: bool,
    pub bijection_ok: bool,
    pub average_ok: bool,
    pub majority: Option<Majority>,
    pub theorem_ok: bool,
    /// Observed only; `f` restricted to `F` is not claimed to be an involution.
    pub is_involution: bool,
    pub witness: Option<Witness>,
}

impl VerificationReport {
    /// `average_size - |G| / 2`.
    pub fn average_slack(&self) -> Ratio<i64> {
        let twice = 2 * self.size_sum as i64 - self.family_size as i64 * self.group.order() as i64;
        Ratio::new(twice, 2 * self.family_size as i64)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson::from(self)).expect("report serializes")
    }
}

#[derive(Serialize)]
struct RatioJson {
    num: i64,
    den: i64,
}

#[derive(Serialize)]
struct WitnessJson {
    check: Check,
    s: Option<Vec<usize>>,
    f_s: Option<Vec<usize>>,
    interior_s: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct ReportJson {
    group: String,
    r_set: Vec<usize>,
    family_size: u64,
    size_sum: u64,
    average_size: RatioJson,
    min_slack: i64,
    eq1_ok: bool,
    eq2_ok: bool,
    eq3_ok: bool,
    bijection_ok: bool,
    average_ok: bool,
    majority: Option<Majority>,
    theorem_ok: bool,
    is_involution: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson>,
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        ReportJson {
            group: r.group.to_string(),
            r_set: r.r_set.indices(),
            family_size: r.family_size,
            size_sum: r.size_sum,
            average_size: RatioJson {
                num: *r.average_size.numer() as i64,
                den: *r.average_size.denom() as i64,
            },
            min_slack: r.min_slack,
            eq1_ok: r.eq1_ok,
            eq2_ok: r.eq2_ok,
            eq3_ok: r.eq3_ok,
            bijection_ok: r.bijection_ok,
            average_ok: r.average_ok,
            majority: r.majority,
            theorem_ok: r.theorem_ok,
            is_involution: r.is_involution,
            witness: r.witness.as_ref().map(|w| WitnessJson {
                check: w.check,
                s: w.sets.as_ref().map(|t| t.0.indices()),
                f_s: w.sets.as_ref().map(|t| t.1.indices()),
                interior_s: w.sets.as_ref().map(|t| t.2.indices()),
            }),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "ok" } else { "FAILED" };
        writeln!(f, "group         {}", self.group)?;
        writeln!(f, "R             {}", self.r_set)?;
        writeln!(f, "family size   {}", self.family_size)?;
        writeln!(f, "size sum      {}", self.size_sum)?;
        writeln!(
            f,
            "average size  {} (>= {}/2: {})",
            self.average_size,
            self.group.order(),
            yn(self.average_ok)
        )?;
        writeln!(f, "min slack     {}", self.min_slack)?;
        writeln!(f, "eq1           {}", yn(self.eq1_ok))?;
        writeln!(f, "eq2           {}", yn(self.eq2_ok))?;
        writeln!(f, "eq3           {}", yn(self.eq3_ok))?;
        writeln!(f, "bijection     {}", yn(self.bijection_ok))?;
        match self.majority {
            Some(m) => writeln!(f, "majority      {} in {} of {}", m.element, m.count, self.family_size)?,
            None => writeln!(f, "majority      none")?,
        }
        writeln!(f, "involution    {}", if self.is_involution { "yes" } else { "no" })?;
        write!(f, "theorem       {}", yn(self.theorem_ok))
    }
}

/// `count[x] = |{S ∈ F : x ∈ S}|`.
pub fn element_frequencies(family: &SetFamily) -> Vec<u64> {
    let mut counts = vec![0u64; family.spec().order()];
    for s in family.iter() {
        for x in s.iter() {
            counts[x.index()] += 1;
        }
    }
    counts
}

/// Most frequent element (smallest index on ties), reported only if it lies
/// in at least half of the members.
pub fn majority_element(family: &SetFamily) -> Result<Option<Majority>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(majority_from_counts(&element_frequencies(family), family.len() as u64))
}

fn majority_from_counts(counts: &[u64], family_size: u64) -> Option<Majority> {
    let (element, &count) = counts
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, c)| *c)?;
    (2 * count >= family_size).then_some(Majority { element, count })
}

/// `size_sum / family_size >= log2(family_size) / 2`, i.e.
/// `2^(2 * size_sum) >= family_size^family_size`, compared exactly.
pub fn reimer_bound_holds(size_sum: u64, family_size: u64) -> bool {
    if family_size <= 1 {
        return true;
    }
    if family_size.is_power_of_two() {
        let k = family_size.trailing_zeros() as u128;
        return 2 * size_sum as u128 >= k * family_size as u128;
    }
    let exp = u32::try_from(family_size).expect("family size fits u32");
    let lhs = BigUint::from(1u8) << (2 * size_sum);
    lhs >= BigUint::from(family_size).pow(exp)
}

/// Reimer's average-size bound for an arbitrary union-closed family.
pub fn reimer_check(family: &SetFamily) -> Result<bool> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !family.is_union_closed() {
        return Err(Error::NotUnionClosed);
    }
    Ok(reimer_unchecked(family))
}

pub(crate) fn reimer_unchecked(family: &SetFamily) -> bool {
    reimer_bound_holds(family.size_sum(), family.len() as u64)
}

pub fn verify_theorem(spec: &GroupSpec, r: &GSubset) -> Result<VerificationReport> {
    verify_theorem_bounded(spec, r, DEFAULT_FAMILY_LIMIT)
}

pub fn verify_theorem_bounded(spec: &GroupSpec, r: &GSubset, family_limit: usize) -> Result<VerificationReport> {
    if r.spec() != spec {
        return Err(Error::SpecMismatch {
            left: spec.to_string(),
            right: r.spec().to_string(),
        });
    }
    if r.is_empty() {
        return Err(Error::EmptyR);
    }
    let family = translate_family_bounded(r, family_limit)?;
    Ok(verify_family(spec, r, &family))
}

fn verify_family(spec: &GroupSpec, r: &GSubset, family: &SetFamily) -> VerificationReport {
    let order = spec.order() as i64;
    let size = family.len();
    let (mut eq1, mut eq2, mut eq3, mut into) = (true, true, true, true);
    let mut min_slack = i64::MAX;
    let mut witness: Option<Witness> = None;
    let mut image: Vec<Option<usize>> = Vec::with_capacity(size);
    let mut details = Vec::with_capacity(size);

    for s in family.iter() {
        let int = s.interior(r).expect("same group");
        let fs = int.complement().negate();
        let alt = f_map_alt(s, r).expect("nonempty R");
        let slack = s.len() as i64 + fs.len() as i64 - order;
        min_slack = min_slack.min(slack);

        let pos = family.position(&fs);
        let checks = [
            (Check::Eq1, slack >= 0),
            (Check::Eq2, fs == alt),
            (Check::Eq3, int.neighbourhood(r).expect("same group") == *s),
            (Check::Bijection, pos.is_some()),
        ];
        eq1 &= checks[0].1;
        eq2 &= checks[1].1;
        eq3 &= checks[2].1;
        into &= checks[3].1;
        if witness.is_none() {
            if let Some(&(check, _)) = checks.iter().find(|c| !c.1) {
                witness = Some(Witness {
                    check,
                    sets: Some((s.clone(), fs.clone(), int.clone())),
                });
            }
        }
        image.push(pos);
        details.push((fs, int));
    }

    let mut injective = true;
    if into {
        let mut hit = vec![false; size];
        for (i, p) in image.iter().enumerate() {
            let p = p.expect("checked above");
            if std::mem::replace(&mut hit[p], true) {
                injective = false;
                if witness.is_none() {
                    let (fs, int) = details[i].clone();
                    witness = Some(Witness {
                        check: Check::Bijection,
                        sets: Some((family.members()[i].clone(), fs, int)),
                    });
                }
                break;
            }
        }
    }
    let bijection = into && injective;
    let is_involution = bijection
        && image
            .iter()
            .enumerate()
            .all(|(i, p)| image[p.expect("into")] == Some(i));

    let size_sum = family.size_sum();
    let average_ok = 2 * size_sum as u128 >= size as u128 * order as u128;
    let majority = majority_from_counts(&element_frequencies(family), size as u64);
    if witness.is_none() {
        if !average_ok {
            witness = Some(Witness { check: Check::Average, sets: None });
        } else if majority.is_none() {
            witness = Some(Witness { check: Check::Majority, sets: None });
        }
    }

    VerificationReport {
        group: spec.clone(),
        r_set: r.clone(),
        family_size: size as u64,
        size_sum,
        average_size: Ratio::new(size_sum, size as u64),
        min_slack: if size == 0 { 0 } else { min_slack },
        eq1_ok: eq1,
        eq2_ok: eq2,
        eq3_ok: eq3,
        bijection_ok: bijection,
        average_ok,
        theorem_ok: eq1 && eq2 && eq3 && bijection && average_ok && majority.is_some(),
        majority,
        is_involution,
        witness,
    }
}

/// Smallest member, in canonical order, of the orbit of `r` under
/// translations and negation.
pub fn orbit_representative(r: &GSubset) -> GSubset {
    let neg = r.negate();
    r.spec()
        .elements()
        .flat_map(|g| [r.translate(g).expect("in range"), neg.translate(g).expect("in range")])
        .min()
        .expect("group is nonempty")
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Keep one R per translation/negation orbit.
    pub canonicalize: bool,
    pub jobs: usize,
    pub max_order: usize,
    pub family_limit: usize,
    /// Keep every per-instance report in the summary.
    pub keep_reports: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            canonicalize: false,
            jobs: 1,
            max_order: DEFAULT_SWEEP_MAX_ORDER,
            family_limit: DEFAULT_FAMILY_LIMIT,
            keep_reports: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub group: GroupSpec,
    pub canonical: bool,
    pub instances: u64,
    pub all_ok: bool,
    pub min_average_slack: Ratio<i64>,
    pub extremal_r: GSubset,
    pub max_family_size: u64,
    /// Every instance whose `theorem_ok` is false.
    pub failures: Vec<VerificationReport>,
    pub reports: Option<Vec<VerificationReport>>,
}

#[derive(Serialize)]
struct SweepJson {
    group: String,
    canonical: bool,
    instances: u64,
    all_ok: bool,
    min_average_slack: RatioJson,
    extremal_r: Vec<usize>,
    max_family_size: u64,
    failures: Vec<ReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reports: Option<Vec<ReportJson>>,
}

impl SweepSummary {
    pub fn to_json(&self) -> serde_json::Value {
        let json = SweepJson {
            group: self.group.to_string(),
            canonical: self.canonical,
            instances: self.instances,
            all_ok: self.all_ok,
            min_average_slack: RatioJson {
                num: *self.min_average_slack.numer(),
                den: *self.min_average_slack.denom(),
            },
            extremal_r: self.extremal_r.indices(),
            max_family_size: self.max_family_size,
            failures: self.failures.iter().map(ReportJson::from).collect(),
            reports: self
                .reports
                .as_ref()
                .map(|rs| rs.iter().map(ReportJson::from).collect()),
        };
        serde_json::to_value(json).expect("summary serializes")
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group              {}", self.group)?;
        writeln!(f, "canonical          {}", self.canonical)?;
        writeln!(f, "instances          {}", self.instances)?;
        writeln!(f, "all ok             {}", self.all_ok)?;
        writeln!(f, "min average slack  {}", self.min_average_slack)?;
        writeln!(f, "extremal R         {}", self.extremal_r)?;
        write!(f, "max family size    {}", self.max_family_size)?;
        for r in &self.failures {
            write!(f, "\nFAILED R = {}", r.r_set)?;
        }
        Ok(())
    }
}

/// Nonempty R values visited by a sweep, in canonical order.
pub fn sweep_targets(spec: &GroupSpec, canonicalize: bool, max_order: usize) -> Result<Vec<GSubset>> {
    let limit = max_order.min(SWEEP_HARD_LIMIT);
    let n = spec.order();
    if n > limit {
        return Err(Error::GroupTooLarge { order: n, limit });
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let r = GSubset::from_mask(spec, mask)?;
        if !canonicalize || orbit_representative(&r) == r {
            out.push(r);
        }
    }
    Ok(out)
}

pub fn sweep(spec: &GroupSpec, canonicalize: bool) -> Result<SweepSummary> {
    sweep_with(
        spec,
        &SweepConfig {
            canonicalize,
            ..SweepConfig::default()
        },
    )
}

/// Verifies every target R. Instances may run on up to `jobs` threads; the
/// result is merged in canonical R order and does not depend on `jobs`.
pub fn sweep_with(spec: &GroupSpec, config: &SweepConfig) -> Result<SweepSummary> {
    let targets = sweep_targets(spec, config.canonicalize, config.max_order)?;
    let run = |r: &GSubset| verify_theorem_bounded(spec, r, config.family_limit);
    let results: Vec<Result<VerificationReport>> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| targets.par_iter().map(run).collect())
    } else {
        targets.iter().map(run).collect()
    };
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best: Option<(Ratio<i64>, &GSubset)> = None;
    for rep in &reports {
        let slack = rep.average_slack();
        if best.as_ref().is_none_or(|(b, _)| slack < *b) {
            best = Some((slack, &rep.r_set));
        }
    }
    let (min_average_slack, extremal_r) = best.expect("at least one nonempty R");
    let extremal_r = extremal_r.clone();

    Ok(SweepSummary {
        group: spec.clone(),
        canonical: config.canonicalize,
        instances: reports.len() as u64,
        all_ok: reports.iter().all(|r| r.theorem_ok),
        min_average_slack,
        extremal_r,
        max_family_size: reports.iter().map(|r| r.family_size).max().unwrap_or(0),
        failures: reports.iter().filter(|r| !r.theorem_ok).cloned().collect(),
        reports: config.keep_reports.then_some(reports),
    })
}
