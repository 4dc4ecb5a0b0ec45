use std::collections::BTreeMap;

use balset_core::adversary::{minimal_maximizer_property, Adversary, AdversaryResult, EXHAUSTIVE_RANK_LIMIT};
use balset_core::construct::{
    check_lemma1, construct_for_z, lower_bound, lower_bound_even, upper_bound, ConstructionParams,
};
use balset_core::graphs::{verify_lemma2, verify_prop1, verify_prop2, Prop2Status, SubsetFamily};
use balset_core::{DefiningSet, Strategy};
use clap::ValueEnum;

use crate::docs::{swaps_json, Bounds, CertificateDocument, CheckOutcome, DefiningSetDocument};
use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Balance,
    Eq8,
    Lemma1,
    Lemma2,
    Eq10,
    Prop1,
    Prop2,
    Bounds,
}

impl Check {
    pub const DEFAULT: [Check; 7] = [
        Check::Balance,
        Check::Eq8,
        Check::Lemma2,
        Check::Eq10,
        Check::Prop1,
        Check::Prop2,
        Check::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Balance => "balance",
            Check::Eq8 => "eq8",
            Check::Lemma1 => "lemma1",
            Check::Lemma2 => "lemma2",
            Check::Eq10 => "eq10",
            Check::Prop1 => "prop1",
            Check::Prop2 => "prop2",
            Check::Bounds => "bounds",
        }
    }
}

/// Exact worst case, refusing sets beyond the enumeration envelope unless
/// forced. Branch and bound is exact but just as exponential in the worst case.
pub fn exact_worst_case(ds: &DefiningSet, force: bool) -> Result<AdversaryResult, Failure> {
    if ds.ranks() > EXHAUSTIVE_RANK_LIMIT && !force {
        return Err(Failure::Refused(format!(
            "exact evaluation over {} ranks exceeds the limit of {EXHAUSTIVE_RANK_LIMIT}; \
             pass --force-exhaustive to run anyway",
            ds.ranks()
        )));
    }
    Ok(Adversary::new(ds)?.strategy(Strategy::BranchAndBound).run()?)
}

pub fn bounds_for(t: usize) -> Bounds {
    let lb = lower_bound(t as u64);
    Bounds {
        lower: format!("{}/{}", lb.numer(), lb.denom()),
        upper: ConstructionParams::for_t(t as u64).and_then(|p| upper_bound(p.z()).ok()),
    }
}

/// The construction level `ds` is equal to, if any.
fn construction_level(ds: &DefiningSet) -> Option<u32> {
    let params = ConstructionParams::for_t(ds.t() as u64)?;
    let built = construct_for_z(params.z()).ok()?;
    (built == *ds).then_some(params.z())
}

fn outcome(holds: bool, details: String) -> CheckOutcome {
    CheckOutcome { holds, details }
}

fn balance_outcome(ds: &DefiningSet) -> CheckOutcome {
    let v = ds.validate();
    if v.is_ok() {
        outcome(true, format!("{} balanced pairs partition [1,{}]", ds.t(), ds.ranks()))
    } else {
        let msgs: Vec<String> = v.violations.iter().map(ToString::to_string).collect();
        outcome(false, msgs.join("; "))
    }
}

fn run_check(check: Check, ds: &DefiningSet, res: &AdversaryResult) -> Result<CheckOutcome, Failure> {
    let i_star = &res.minimal_maximizer;
    Ok(match check {
        Check::Balance => balance_outcome(ds),
        Check::Eq8 => outcome(
            minimal_maximizer_property(ds, res),
            format!("worst case {}, |I*| = {}", res.worst_case, i_star.len()),
        ),
        Check::Lemma1 => {
            let z = construction_level(ds)
                .ok_or_else(|| Failure::Invalid("lemma1 applies only to construction levels; use --z".into()))?;
            let r = check_lemma1(z)?;
            outcome(
                r.holds,
                format!(
                    "d_{} = {}, d_{} = {}, {} <= 2*{}+2",
                    z,
                    r.d_z,
                    z + 1,
                    r.d_z_plus_1,
                    r.d_z_plus_1,
                    r.d_z
                ),
            )
        }
        Check::Lemma2 => {
            let r = verify_lemma2(ds, i_star)?;
            let good = r.components.iter().filter(|c| c.holds).count();
            let bad: Vec<String> = r
                .components
                .iter()
                .filter(|c| !c.holds)
                .map(|c| {
                    format!(
                        "component {:?}: in-out = {} (degrees {}) > bound {}",
                        c.nodes, c.crossing_balance, c.degree_balance, c.bound
                    )
                })
                .collect();
            let mut details = format!(
                "{good}/{} components hold; d_in - d_out = {} (>= -2: {}); flow balanced: {}",
                r.components.len(),
                r.swp_balance,
                r.slack_holds,
                r.flow_holds
            );
            for b in &bad {
                details.push_str("; ");
                details.push_str(b);
            }
            outcome(r.components_hold() && r.slack_holds && r.flow_holds, details)
        }
        Check::Eq10 => {
            let r = verify_lemma2(ds, i_star)?;
            outcome(r.eq10_holds, format!("4*{} >= 3*{} - 2", r.edges, r.vertices))
        }
        Check::Prop1 => {
            let r = verify_prop1(ds, i_star, &[SubsetFamily::Components, SubsetFamily::Singletons])?;
            let bad: Vec<String> = r
                .failures()
                .map(|s| format!("{:?}: in = {} > d = {}", s.nodes, s.arcs_in, s.incident_edges))
                .collect();
            let mut details = format!(
                "{} subsets (components and singletons), {} violations",
                r.subsets.len(),
                bad.len()
            );
            if !bad.is_empty() {
                details = format!("{details}: {}", bad.join("; "));
            }
            outcome(r.holds(), details)
        }
        Check::Prop2 => {
            let r = verify_prop2(ds, i_star)?;
            let mut checked = 0;
            let mut skipped = 0;
            let mut bad = Vec::new();
            for n in &r.nodes {
                match n.status {
                    Prop2Status::Checked { expected, holds } => {
                        checked += 1;
                        if !holds {
                            bad.push(format!("v{}: d + d_out = {} != {expected}", n.node, n.sum()));
                        }
                    }
                    Prop2Status::Type3InAcyclic => bad.push(format!("v{}: type 3 in an acyclic component", n.node)),
                    Prop2Status::OutOfRegime => skipped += 1,
                }
            }
            let mut details = format!("{checked} nodes checked, {skipped} in cyclic components");
            if !bad.is_empty() {
                details = format!("{details}; {}", bad.join("; "));
            }
            outcome(r.holds(), details)
        }
        Check::Bounds => {
            let t = ds.t() as u64;
            let lower = lower_bound_even(t);
            let mut holds = res.worst_case >= lower;
            let mut details = format!("worst case {} >= {lower}", res.worst_case);
            if let Some(z) = construction_level(ds) {
                let upper = upper_bound(z)?;
                holds &= res.worst_case <= upper;
                details.push_str(&format!("; construction level z={z}: {} <= {upper}", res.worst_case));
            }
            outcome(holds, details)
        }
    })
}

/// Builds a certificate. An unbalanced set fails the balance check and every
/// other requested check is reported as not evaluated.
pub fn certify(
    doc: &DefiningSetDocument,
    checks: &[Check],
    want_worst_case: bool,
    force: bool,
) -> Result<CertificateDocument, Failure> {
    let ds = doc.to_set();
    let mut results = BTreeMap::new();
    let balanced = ds.validate().is_ok();
    let needs_adversary = want_worst_case || checks.iter().any(|&c| c != Check::Balance);
    let res = if balanced && needs_adversary {
        Some(exact_worst_case(&ds, force)?)
    } else {
        None
    };
    for &check in checks {
        let o = match &res {
            _ if check == Check::Balance => balance_outcome(&ds),
            Some(r) => run_check(check, &ds, r)?,
            None => outcome(false, "not evaluated: the defining set is not balanced".into()),
        };
        results.insert(check.name().to_string(), o);
    }
    Ok(CertificateDocument {
        input_digest: doc.digest(),
        worst_case: res.as_ref().map(|r| r.worst_case),
        minimal_maximizer: res.as_ref().map(|r| swaps_json(&r.minimal_maximizer)),
        bounds: bounds_for(doc.t),
        checks: results,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
