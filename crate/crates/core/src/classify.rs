//! Sorting family instances into equivalence classes.
//!
//! Instances are first merged along explicit witnesses (Carlet orbits, F4
//! normalisation), then the surviving anchors are compared pairwise with the
//! restricted search. A failed search only counts as inequivalence when the
//! reduction behind it applies; otherwise CCZ invariants are compared, and
//! failing that the pair stays undecided.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::apn::{apn_naive, to_truth_table, DifferentialSpectrum};
use crate::biproj::{BiprojectivePair, Coeffs};
use crate::equivalence::carlet::{carlet_orbits, least_noncube, orbit_witness};
use crate::equivalence::centralizer::centralizer_search;
use crate::equivalence::el::{is_graph_equiv, quadratic_check, ELMap};
use crate::equivalence::known::{f4_conjugate, F4Normalizer};
use crate::equivalence::restricted::{check_preconditions, search_equivalence, Justification, RestrictedOutcome};
use crate::error::{Error, Result};
use crate::family::{enumerate_params, make_family, FamilyParams, FamilyTag};
use crate::field::{euler_phi, FieldCtx, FieldElement as Fe};
use crate::walsh::{extended_walsh_spectrum, WalshSpectrum};

/// Largest n for which witnesses are checked on the whole graph.
const FULL_CHECK_MAX_N: u32 = 14;

#[derive(Clone, Debug)]
pub struct Policy {
    /// merge along explicit witnesses before searching
    pub premerge: bool,
    /// largest n = 2m for which invariants are computed
    pub invariant_max_n: u32,
    /// allow failed searches to count as inequivalence where the reduction applies
    pub certify: bool,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { premerge: true, invariant_max_n: 12, certify: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equivalent,
    ExponentFilter,
    CoefficientObstruction,
    InvariantSeparation,
    Undecided,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::ExponentFilter => "exponent-filter",
            Verdict::CoefficientObstruction => "coefficient-obstruction",
            Verdict::InvariantSeparation => "invariant-separation",
            Verdict::Undecided => "undecided",
        }
    }

    pub fn is_inequivalence(self) -> bool {
        !matches!(self, Verdict::Equivalent | Verdict::Undecided)
    }
}

impl From<Justification> for Verdict {
    fn from(j: Justification) -> Self {
        match j {
            Justification::ExponentFilter => Verdict::ExponentFilter,
            Justification::CoefficientObstruction => Verdict::CoefficientObstruction,
        }
    }
}

/// Outcome for an ordered pair (F, G); a witness satisfies is_graph_equiv(F, G, witness).
#[derive(Clone, Debug)]
pub struct PairVerdict {
    pub verdict: Verdict,
    pub witness: Option<ELMap>,
}

/// Whether the group-theoretic argument behind a failed search is available at m.
pub fn certification_available(m: u32) -> bool {
    m > 2 && m != 6
}

/// Checks a witness on the full graph when small, else on the quadratic basis set.
pub fn verify_witness(f: &BiprojectivePair, g: &BiprojectivePair, gamma: &ELMap) -> Result<bool> {
    if 2 * f.m() <= FULL_CHECK_MAX_N {
        is_graph_equiv(f, g, gamma)
    } else {
        Ok(quadratic_check(f, g, gamma))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Invariants {
    diff: DifferentialSpectrum,
    walsh: WalshSpectrum,
}

/// Decides pairs among a fixed list, caching centralizers and invariants.
pub struct Judge {
    pairs: Vec<BiprojectivePair>,
    policy: Policy,
    cond_c: Vec<OnceLock<bool>>,
    invariants: Vec<OnceLock<Option<Invariants>>>,
}

impl Judge {
    pub fn new(pairs: Vec<BiprojectivePair>, policy: Policy) -> Self {
        let n = pairs.len();
        Judge {
            pairs,
            policy,
            cond_c: (0..n).map(|_| OnceLock::new()).collect(),
            invariants: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn pairs(&self) -> &[BiprojectivePair] {
        &self.pairs
    }

    fn condition_c(&self, i: usize) -> bool {
        *self.cond_c[i].get_or_init(|| centralizer_search(&self.pairs[i]).map(|r| r.condition_c).unwrap_or(false))
    }

    fn invariants(&self, i: usize) -> Option<&Invariants> {
        self.invariants[i]
            .get_or_init(|| {
                let p = &self.pairs[i];
                if 2 * p.m() > self.policy.invariant_max_n {
                    return None;
                }
                let table = to_truth_table(p).ok()?;
                let (_, diff) = apn_naive(&table);
                let walsh = extended_walsh_spectrum(&table).ok()?;
                Some(Invariants { diff, walsh })
            })
            .as_ref()
    }

    pub fn decide(&self, i: usize, j: usize) -> Result<PairVerdict> {
        let (f, g) = (&self.pairs[i], &self.pairs[j]);
        let ctx = &*f.ctx;
        let (side, forward, outcome) = if check_preconditions(f).is_ok() {
            (Some(i), true, search_equivalence(f, g)?)
        } else if check_preconditions(g).is_ok() {
            (Some(j), false, search_equivalence(g, f)?)
        } else {
            (None, true, search_equivalence(f, g)?)
        };
        match outcome {
            RestrictedOutcome::Equivalent(w) => {
                let gamma = if forward { w.gamma } else { w.gamma.inverse(ctx)? };
                if !verify_witness(f, g, &gamma)? {
                    return Err(Error::SearchFailed(format!("witness failed verification for {f} and {g}")));
                }
                Ok(PairVerdict { verdict: Verdict::Equivalent, witness: Some(gamma) })
            }
            RestrictedOutcome::NotFound(j_) => {
                let certified = self.policy.certify
                    && certification_available(ctx.m())
                    && side.is_some_and(|s| self.condition_c(s));
                let verdict = if certified {
                    j_.into()
                } else {
                    match (self.invariants(i), self.invariants(j)) {
                        (Some(a), Some(b)) if a != b => Verdict::InvariantSeparation,
                        _ => Verdict::Undecided,
                    }
                };
                Ok(PairVerdict { verdict, witness: None })
            }
        }
    }
}

/// How an instance got into its class.
#[derive(Clone, Debug)]
pub enum Link {
    Representative,
    /// is_graph_equiv(this, target, gamma) with gamma rebuilt from the matrix
    CarletOrbit { target: u32, matrix: Coeffs },
    /// is_graph_equiv(this, target, gamma) from the F4 closed forms
    F4ClosedForm { target: u32, gamma: Box<ELMap> },
    /// is_graph_equiv(this, target, gamma) from the restricted search
    Search { target: u32, gamma: Box<ELMap> },
}

impl Link {
    pub fn target(&self) -> Option<usize> {
        match self {
            Link::Representative => None,
            Link::CarletOrbit { target, .. } | Link::F4ClosedForm { target, .. } | Link::Search { target, .. } => {
                Some(*target as usize)
            }
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            Link::Representative => "representative",
            Link::CarletOrbit { .. } => "carlet-orbit",
            Link::F4ClosedForm { .. } => "f4-closed-form",
            Link::Search { .. } => "restricted-search",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InstanceRecord {
    pub params: FamilyParams,
    pub class: u32,
    pub link: Link,
}

/// Verdict between two anchors, by instance index.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnchorVerdict {
    pub a: usize,
    pub b: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub id: usize,
    pub representative: String,
    pub pair: String,
    pub size: usize,
    /// anchors left after premerging that fell into this class
    pub anchors: usize,
}

/// Bounds phi(m)(2^{m/2} - 2)/(2m) <= N <= phi(m)(2^{m/2} - 2)/2 on the F4 class count.
#[derive(Clone, Debug, Serialize)]
pub struct F4Bounds {
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    /// false at m = 6, where the bounds are evaluated outside their hypothesis
    pub hypothesis_holds: bool,
}

pub fn f4_bounds(m: u32) -> (f64, f64) {
    let top = euler_phi(m as u64) as f64 * ((1u64 << (m / 2)) as f64 - 2.0);
    (top / (2.0 * m as f64), top / 2.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub m: u32,
    pub family: String,
    pub instance_count: usize,
    pub anchor_count: usize,
    pub class_count: usize,
    pub classes: Vec<ClassSummary>,
    pub verdict_counts: BTreeMap<String, usize>,
    pub undecided: usize,
    pub certification: bool,
    pub bounds: Option<F4Bounds>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub instances: Vec<InstanceRecord>,
    #[serde(skip)]
    pub verdicts: Vec<AnchorVerdict>,
    #[serde(skip)]
    ctx: Option<Arc<FieldCtx>>,
}

impl ClassificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    /// Justification column: how a merged instance was merged, or the
    /// verdicts a representative received against earlier classes.
    pub fn justification(&self, i: usize) -> String {
        let rec = &self.instances[i];
        match rec.link {
            Link::Representative => {
                let mut names: Vec<&str> =
                    self.verdicts.iter().filter(|v| v.a == i).map(|v| v.verdict.name()).collect();
                names.sort_unstable();
                names.dedup();
                if names.is_empty() {
                    "first".to_string()
                } else {
                    names.join("|")
                }
            }
            ref l => format!("equivalent:{}", l.source()),
        }
    }

    /// One row per instance: params, class id, justification.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["params", "class", "justification"]).map_err(io)?;
        for (i, rec) in self.instances.iter().enumerate() {
            out.write_record([rec.params.to_string(), rec.class.to_string(), self.justification(i)]).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }

    /// The witness for instance i against its link target.
    pub fn witness(&self, i: usize) -> Result<Option<(usize, ELMap)>> {
        let ctx = self.ctx.as_ref().ok_or_else(|| Error::Domain("report has no field context".into()))?;
        let rec = &self.instances[i];
        Ok(match &rec.link {
            Link::Representative => None,
            Link::CarletOrbit { target, matrix } => {
                let FamilyParams::Carlet { k, b, c, d } = self.instances[*target as usize].params else {
                    return Err(Error::Domain("Carlet link to a non-Carlet target".into()));
                };
                let (_, gamma) = orbit_witness(ctx, k, &[Fe::ONE, b, c, d], matrix)?;
                Some((*target as usize, gamma))
            }
            Link::F4ClosedForm { target, gamma } | Link::Search { target, gamma } => {
                Some((*target as usize, (**gamma).clone()))
            }
        })
    }

    /// Re-checks the witness of instance i.
    pub fn verify_link(&self, i: usize) -> Result<bool> {
        let ctx = self.ctx.as_ref().ok_or_else(|| Error::Domain("report has no field context".into()))?;
        match self.witness(i)? {
            None => Ok(true),
            Some((t, gamma)) => {
                let f = make_family(ctx, self.instances[i].params)?.pair;
                let g = make_family(ctx, self.instances[t].params)?.pair;
                verify_witness(&f, &g, &gamma)
            }
        }
    }

    /// Partition as sorted lists of parameter strings.
    pub fn partition(&self) -> Vec<Vec<String>> {
        let mut groups: BTreeMap<u32, Vec<String>> = BTreeMap::new();
        for r in &self.instances {
            groups.entry(r.class).or_default().push(r.params.to_string());
        }
        let mut out: Vec<Vec<String>> = groups
            .into_values()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        out.sort();
        out
    }

    pub fn representatives(&self) -> Vec<FamilyParams> {
        self.classes.iter().map(|c| FamilyParams::parse(&c.representative).expect("representative parses")).collect()
    }
}

/// Premerge step: for each instance, None for an anchor or the link to one.
fn premerge(ctx: &Arc<FieldCtx>, params: &[FamilyParams], notes: &mut Vec<String>) -> Result<Vec<Option<Link>>> {
    let mut links: Vec<Option<Link>> = vec![None; params.len()];

    let mut carlet_by_k: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut f4_by_k: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, p) in params.iter().enumerate() {
        match p {
            FamilyParams::Carlet { k, .. } => carlet_by_k.entry(*k).or_default().push(i),
            FamilyParams::F4 { k, .. } => f4_by_k.entry(*k).or_default().push(i),
            _ => {}
        }
    }

    for (k, idx) in carlet_by_k {
        let forms: Vec<Coeffs> = idx
            .iter()
            .map(|&i| match params[i] {
                FamilyParams::Carlet { b, c, d, .. } => [Fe::ONE, b, c, d],
                _ => unreachable!(),
            })
            .collect();
        for orbit in carlet_orbits(ctx, k, &forms)? {
            let base = idx[orbit.base] as u32;
            for (j, c) in orbit.members {
                if j != orbit.base {
                    links[idx[j]] = Some(Link::CarletOrbit { target: base, matrix: c });
                }
            }
        }
    }

    if !f4_by_k.is_empty() {
        let m = ctx.m();
        let b0 = least_noncube(ctx).ok_or_else(|| Error::Domain("no non-cube".into()))?;
        // delta with is_graph_equiv(canonical, instance, delta), keyed by canonical (k, a)
        let mut groups: HashMap<(u32, Fe), Vec<(usize, ELMap)>> = HashMap::new();
        let mut conj_cache: HashMap<(u32, Fe), ELMap> = HashMap::new();
        for (&k, idx) in &f4_by_k {
            let norm = F4Normalizer::new(ctx, k, b0)?;
            for &i in idx {
                let (a0, g1) = norm.normalize(&params[i])?;
                if 2 * k < m {
                    groups.entry((k, a0)).or_default().push((i, g1));
                } else {
                    let own = FamilyParams::F4 { k, b: b0, a: a0 };
                    let (canon, _) = f4_conjugate(ctx, &own)?;
                    let FamilyParams::F4 { k: ck, a: ca, .. } = canon else { unreachable!() };
                    let g2_inv = match conj_cache.get(&(ck, ca)) {
                        Some(g) => g.clone(),
                        None => {
                            // is_graph_equiv(own, canon, g2)
                            let (_, g2) = f4_conjugate(ctx, &canon)?;
                            let inv = g2.inverse(ctx)?;
                            conj_cache.insert((ck, ca), inv.clone());
                            inv
                        }
                    };
                    groups.entry((ck, ca)).or_default().push((i, g1.compose(ctx, &g2_inv)));
                }
            }
        }
        let mut keys: Vec<_> = groups.keys().copied().collect();
        keys.sort_by_key(|&(k, a)| (k, a.0));
        for key in keys {
            let mut members = groups.remove(&key).unwrap();
            members.sort_by_key(|(i, _)| *i);
            let (t, dt) = members[0].clone();
            let rest: Vec<(usize, Link)> = members[1..]
                .par_iter()
                .map(|(i, di)| {
                    let gamma = dt.compose(ctx, &di.inverse(ctx)?);
                    Ok((*i, Link::F4ClosedForm { target: t as u32, gamma: Box::new(gamma) }))
                })
                .collect::<Result<_>>()?;
            for (i, l) in rest {
                links[i] = Some(l);
            }
        }
        notes.push(format!("F4 instances normalised to B0 = {:#x}", b0.0));
    }
    Ok(links)
}

/// Classifies a list of parameter tuples, all at the context's m.
pub fn classify_params(ctx: &Arc<FieldCtx>, params: Vec<FamilyParams>, family: &str, policy: &Policy) -> Result<ClassificationReport> {
    let m = ctx.m();
    let mut notes = Vec::new();
    let certification = policy.certify && certification_available(m);
    if policy.certify && !certification {
        notes.push(format!("m = {m}: group-theoretic certification disabled; failed searches need invariant separation"));
    }
    let pre = if policy.premerge { premerge(ctx, &params, &mut notes)? } else { vec![None; params.len()] };
    let anchors: Vec<usize> = (0..params.len()).filter(|&i| pre[i].is_none()).collect();
    let pairs: Vec<BiprojectivePair> =
        anchors.iter().map(|&i| make_family(ctx, params[i]).map(|f| f.pair)).collect::<Result<_>>()?;
    let judge = Judge::new(pairs, policy.clone());

    // union-find over anchors, comparing each against the current representatives
    let mut reps: Vec<usize> = Vec::new();
    let mut anchor_link: Vec<Link> = Vec::with_capacity(anchors.len());
    let mut anchor_class: Vec<u32> = Vec::with_capacity(anchors.len());
    let mut verdicts = Vec::new();
    for a in 0..anchors.len() {
        let results: Vec<PairVerdict> = reps.par_iter().map(|&r| judge.decide(a, r)).collect::<Result<_>>()?;
        let hit = results.iter().position(|v| v.verdict == Verdict::Equivalent);
        for (c, v) in results.iter().enumerate() {
            if v.verdict != Verdict::Equivalent {
                verdicts.push(AnchorVerdict { a: anchors[a], b: anchors[reps[c]], verdict: v.verdict });
            }
        }
        match hit {
            Some(c) => {
                let gamma = results[c].witness.clone().expect("equivalent verdicts carry witnesses");
                anchor_link.push(Link::Search { target: anchors[reps[c]] as u32, gamma: Box::new(gamma) });
                anchor_class.push(c as u32);
            }
            None => {
                anchor_link.push(Link::Representative);
                anchor_class.push(reps.len() as u32);
                reps.push(a);
            }
        }
    }

    let mut class_of_anchor: HashMap<usize, u32> = HashMap::new();
    for (a, &i) in anchors.iter().enumerate() {
        class_of_anchor.insert(i, anchor_class[a]);
    }
    let mut anchor_link = anchor_link.into_iter();
    let mut instances: Vec<InstanceRecord> = Vec::with_capacity(params.len());
    for (i, link) in pre.into_iter().enumerate() {
        let link = link.unwrap_or_else(|| anchor_link.next().expect("one link per anchor"));
        instances.push(InstanceRecord { params: params[i], class: 0, link });
    }
    for i in 0..instances.len() {
        let target = instances[i].link.target();
        let anchor = match target {
            Some(t) if !class_of_anchor.contains_key(&i) => t,
            _ => i,
        };
        instances[i].class = class_of_anchor[&anchor];
    }

    let mut sizes = vec![0usize; reps.len()];
    let mut anchor_counts = vec![0usize; reps.len()];
    for r in &instances {
        sizes[r.class as usize] += 1;
    }
    for c in &anchor_class {
        anchor_counts[*c as usize] += 1;
    }
    let classes: Vec<ClassSummary> = reps
        .iter()
        .enumerate()
        .map(|(c, &a)| ClassSummary {
            id: c,
            representative: params[anchors[a]].to_string(),
            pair: judge.pairs()[a].to_text(),
            size: sizes[c],
            anchors: anchor_counts[c],
        })
        .collect();

    let mut verdict_counts = BTreeMap::new();
    for v in &verdicts {
        *verdict_counts.entry(v.verdict.name().to_string()).or_insert(0) += 1;
    }
    let undecided = verdicts.iter().filter(|v| v.verdict == Verdict::Undecided).count();
    let bounds = (family == FamilyTag::F4.name()).then(|| {
        let (lower, upper) = f4_bounds(m);
        let n = classes.len() as f64;
        F4Bounds { lower, upper, within: lower <= n && n <= upper, hypothesis_holds: m != 6 }
    });
    Ok(ClassificationReport {
        m,
        family: family.to_string(),
        instance_count: instances.len(),
        anchor_count: anchors.len(),
        class_count: classes.len(),
        classes,
        verdict_counts,
        undecided,
        certification,
        bounds,
        notes,
        instances,
        verdicts,
        ctx: Some(ctx.clone()),
    })
}

/// All instances of a family at the context's m, classified.
pub fn classify_family(ctx: &Arc<FieldCtx>, tag: FamilyTag, policy: &Policy) -> Result<ClassificationReport> {
    classify_params(ctx, enumerate_params(ctx, tag)?, tag.name(), policy)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRep {
    pub family: String,
    pub params: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossVerdict {
    pub a: usize,
    pub b: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub m: u32,
    pub family: String,
    pub representatives: Vec<SweepRep>,
    pub pairs: Vec<CrossVerdict>,
    pub verdict_counts: BTreeMap<String, usize>,
    pub undecided: usize,
    pub equivalences: usize,
    pub certification: bool,
    pub notes: Vec<String>,
}

impl SweepReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["first", "second", "verdict"]).map_err(io)?;
        for p in &self.pairs {
            out.write_record([&self.representatives[p.a].params, &self.representatives[p.b].params, p.verdict.name()])
                .map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Families swept by default.
pub const SWEEP_FAMILIES: [FamilyTag; 7] = [
    FamilyTag::Gold,
    FamilyTag::Carlet,
    FamilyTag::Taniguchi,
    FamilyTag::ZhouPott,
    FamilyTag::F1,
    FamilyTag::F2,
    FamilyTag::F4,
];

/// One representative per within-family class (every instance for Gold),
/// then every pair from different families.
pub fn cross_family_sweep(ctx: &Arc<FieldCtx>, tags: &[FamilyTag], policy: &Policy) -> Result<SweepReport> {
    let m = ctx.m();
    if m < 3 {
        return Err(Error::UnsupportedM(format!("the sweep needs m >= 3, got {m}")));
    }
    let mut notes = Vec::new();
    let mut reps: Vec<(FamilyTag, FamilyParams)> = Vec::new();
    for &tag in tags {
        let params = match enumerate_params(ctx, tag) {
            Ok(p) => p,
            Err(Error::UnsupportedM(why)) => {
                notes.push(format!("{} skipped: {why}", tag.name()));
                continue;
            }
            Err(e) => return Err(e),
        };
        if params.is_empty() {
            notes.push(format!("{} has no instances at m = {m}", tag.name()));
            continue;
        }
        if tag == FamilyTag::Gold {
            reps.extend(params.into_iter().map(|p| (tag, p)));
            continue;
        }
        let report = classify_params(ctx, params, tag.name(), policy)?;
        if report.undecided > 0 {
            notes.push(format!("{}: {} undecided within-family verdicts", tag.name(), report.undecided));
        }
        reps.extend(report.representatives().into_iter().map(|p| (tag, p)));
    }
    let pairs: Vec<BiprojectivePair> =
        reps.iter().map(|(_, p)| make_family(ctx, *p).map(|f| f.pair)).collect::<Result<_>>()?;
    let judge = Judge::new(pairs, policy.clone());
    let todo: Vec<(usize, usize)> = (0..reps.len())
        .flat_map(|a| (a + 1..reps.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| reps[a].0 != reps[b].0)
        .collect();
    let verdicts: Vec<CrossVerdict> = todo
        .par_iter()
        .map(|&(a, b)| {
            let v = judge.decide(a, b)?;
            Ok(CrossVerdict { a, b, verdict: v.verdict, witness: v.witness.map(|w| w.to_text()) })
        })
        .collect::<Result<_>>()?;
    let mut verdict_counts = BTreeMap::new();
    for v in &verdicts {
        *verdict_counts.entry(v.verdict.name().to_string()).or_insert(0) += 1;
    }
    Ok(SweepReport {
        m,
        family: "cross-family".into(),
        representatives: reps
            .iter()
            .map(|(t, p)| SweepRep { family: t.name().to_string(), params: p.to_string() })
            .collect(),
        undecided: verdicts.iter().filter(|v| v.verdict == Verdict::Undecided).count(),
        equivalences: verdicts.iter().filter(|v| v.verdict == Verdict::Equivalent).count(),
        pairs: verdicts,
        verdict_counts,
        certification: policy.certify && certification_available(m),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_at_m5() {
        let ctx = FieldCtx::new(5).unwrap();
        let r = classify_family(&ctx, FamilyTag::F1, &Policy::default()).unwrap();
        assert_eq!(r.class_count, 2);
        assert_eq!(
            r.partition(),
            vec![vec!["f1:k=1".to_string(), "f1:k=4".into()], vec!["f1:k=2".to_string(), "f1:k=3".into()]]
        );
        assert_eq!(r.undecided, 0);
        for i in 0..r.instances.len() {
            assert!(r.verify_link(i).unwrap());
        }
    }

    #[test]
    fn order_independent() {
        let ctx = FieldCtx::new(5).unwrap();
        let mut params = enumerate_params(&ctx, FamilyTag::F2).unwrap();
        let a = classify_params(&ctx, params.clone(), "f2", &Policy::default()).unwrap();
        params.reverse();
        let b = classify_params(&ctx, params, "f2", &Policy::default()).unwrap();
        assert_eq!(a.partition(), b.partition());
    }

    #[test]
    fn bounds_at_m10() {
        assert_eq!(f4_bounds(10), (6.0, 60.0));
    }

    #[test]
    fn csv_rows() {
        let ctx = FieldCtx::new(5).unwrap();
        let r = classify_family(&ctx, FamilyTag::F1, &Policy::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.contains("equivalent:restricted-search"));
    }
}
