//! Swap graph and potential graph of a defining set under a swap set, and
//! checkers for the degree inequalities that drive the lower bound.
//!
//! Nodes `1..=t` stand for the companion pairs; node `0` is the virtual node
//! that absorbs the boundary swaps `(0, 1)` and `(4t, 4t + 1)`.
//!
//! * The swap graph has one undirected edge per swap in `I`, joining the
//!   pairs that hold its two ranks (self-loops and multi-edges kept).
//! * The potential graph has an arc `u -> v` for each swap `(i, i + 1)` not in
//!   `I` that would push pair `u` further from balance, `v` being the pair
//!   holding the other endpoint. Which pair holds a rank is read from the
//!   original sets by default; sums always come from the swapped sets.
//!
//! The checkers never fail on a false inequality; they return reports.

mod export;

pub use export::{export_graphs, import_graphs, ExportedGraphs, GraphFormat};

use std::fmt;

use crate::companion::{classify_pair, DefiningSet, PairType, Rank, RankLayout, Side, Swap, SwapSet};
use crate::error::{Error, Result};

/// Largest `t` for which every node subset is checked.
pub const ALL_SUBSETS_T_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwpEdge {
    /// Smaller endpoint.
    pub a: usize,
    pub b: usize,
    pub swap: Swap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwpGraph {
    pub t: usize,
    pub edges: Vec<SwpEdge>,
    /// Connected components, each sorted, ordered by smallest node.
    pub components: Vec<Vec<usize>>,
}

/// Which rule produced an arc of the potential graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcRule {
    /// Membership/sum conditions 1 to 6.
    Condition(u8),
    /// Boundary rules 1 and 2 for the virtual swaps.
    Boundary(u8),
}

impl fmt::Display for ArcRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcRule::Condition(k) => write!(f, "{k}"),
            ArcRule::Boundary(k) => write!(f, "b{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PotArc {
    pub from: usize,
    pub to: usize,
    /// Lower endpoint of the generating swap; `0` is the swap `(0, 1)`.
    pub lower: Rank,
    pub rule: ArcRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotGraph {
    pub t: usize,
    pub arcs: Vec<PotArc>,
}

/// Which sets membership tests read when building the potential graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Membership {
    /// The sets before the swaps, as the arc conditions are written.
    #[default]
    Original,
    /// The sets after the swaps.
    Primed,
}

fn union_find_components(t: usize, edges: &[SwpEdge]) -> Vec<Vec<usize>> {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..=t).collect();
    for e in edges {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); t + 1];
    for v in 1..=t {
        let root = find(&mut parent, v);
        groups[root].push(v);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

impl SwpGraph {
    /// Builds from raw edges, recomputing components.
    pub fn from_edges(t: usize, mut edges: Vec<SwpEdge>) -> Self {
        for e in &mut edges {
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
        }
        let components = union_find_components(t, &edges);
        SwpGraph { t, edges, components }
    }

    /// Edges incident to at least one node of `subset` (self-loops once).
    pub fn incident_edges(&self, subset: &NodeSet) -> usize {
        self.edges
            .iter()
            .filter(|e| subset.contains(e.a) || subset.contains(e.b))
            .count()
    }

    /// `d(v)`.
    pub fn degree(&self, v: usize) -> usize {
        self.incident_edges(&NodeSet::of(self.t, [v]))
    }

    /// Edges with both ends in `component`.
    pub fn edges_within(&self, subset: &NodeSet) -> usize {
        self.edges
            .iter()
            .filter(|e| subset.contains(e.a) && subset.contains(e.b))
            .count()
    }
}

impl PotGraph {
    pub fn degrees(&self) -> DegreeTable {
        let mut d_in = vec![0usize; self.t + 1];
        let mut d_out = vec![0usize; self.t + 1];
        for a in self.arcs.iter().filter(|a| a.from != a.to) {
            d_out[a.from] += 1;
            d_in[a.to] += 1;
        }
        DegreeTable { d_in, d_out }
    }

    /// `in(V)`: arcs entering `subset` from outside.
    pub fn arcs_in(&self, subset: &NodeSet) -> usize {
        self.arcs
            .iter()
            .filter(|a| !subset.contains(a.from) && subset.contains(a.to))
            .count()
    }

    /// `out(V)`: arcs leaving `subset`.
    pub fn arcs_out(&self, subset: &NodeSet) -> usize {
        self.arcs
            .iter()
            .filter(|a| subset.contains(a.from) && !subset.contains(a.to))
            .count()
    }
}

/// A subset of the nodes `0..=t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    member: Vec<bool>,
}

impl NodeSet {
    pub fn of(t: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut member = vec![false; t + 1];
        for v in nodes {
            member[v] = true;
        }
        NodeSet { member }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn nodes(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&v| self.member[v]).collect()
    }
}

/// Per-node degrees of the potential graph. Self-loops are not counted;
/// arcs to the virtual node are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeTable {
    pub d_in: Vec<usize>,
    pub d_out: Vec<usize>,
}

impl DegreeTable {
    pub fn d_in_of(&self, subset: &NodeSet) -> usize {
        subset.nodes().iter().map(|&v| self.d_in[v]).sum()
    }

    pub fn d_out_of(&self, subset: &NodeSet) -> usize {
        subset.nodes().iter().map(|&v| self.d_out[v]).sum()
    }
}

/// Builds the swap graph. Node `k` is the `k`-th pair (1-based).
pub fn build_swp(ds: &DefiningSet, swaps: &SwapSet) -> Result<SwpGraph> {
    ds.require_balanced()?;
    swaps.check_range(ds.t())?;
    let layout = ds.layout()?;
    let edges = swaps
        .iter()
        .map(|s| {
            let a = layout.pair_of(s.lower()) + 1;
            let b = layout.pair_of(s.upper()) + 1;
            SwpEdge {
                a: a.min(b),
                b: a.max(b),
                swap: s,
            }
        })
        .collect();
    Ok(SwpGraph::from_edges(ds.t(), edges))
}

/// Builds the potential graph with the literal (original-set) membership.
pub fn build_pot(ds: &DefiningSet, swaps: &SwapSet) -> Result<PotGraph> {
    build_pot_with(ds, swaps, Membership::Original)
}

pub fn build_pot_with(ds: &DefiningSet, swaps: &SwapSet, membership: Membership) -> Result<PotGraph> {
    ds.require_balanced()?;
    let primed = ds.apply_swaps(swaps)?;
    let primed_layout = primed.layout()?;
    let member: RankLayout = match membership {
        Membership::Original => ds.layout()?,
        Membership::Primed => primed_layout.clone(),
    };
    let diff: Vec<i64> = primed.pairs().iter().map(|p| p.difference()).collect();
    let n = ds.ranks();
    let mut arcs = Vec::new();

    // (0, 1): the holder of rank 1 drops to 0.
    boundary_arcs(&mut arcs, &member, &primed_layout, &diff, 1, 0, -1, Side::Even);

    for i in 1..n {
        if swaps.contains(Swap::at(i)) {
            continue;
        }
        let (pa, sa) = member.locate(i);
        let (pb, sb) = member.locate(i + 1);
        let (na, nb) = (pa + 1, pb + 1);
        let mut push = |from: usize, to: usize, k: u8| {
            arcs.push(PotArc {
                from,
                to,
                lower: i,
                rule: ArcRule::Condition(k),
            })
        };
        // Arcs out of the pair holding i (i moves up).
        let i_plus_1_outside_own_set = !(pa == pb && sa == sb);
        if i_plus_1_outside_own_set {
            match sa {
                Side::Even if diff[pa] < 0 => push(na, nb, 1),
                Side::Odd if diff[pa] > 0 => push(na, nb, 3),
                Side::Odd if diff[pa] == 0 => push(na, nb, 5),
                _ => {}
            }
            // Arcs out of the pair holding i + 1 (i + 1 moves down).
            match sb {
                Side::Even if diff[pb] > 0 => push(nb, na, 2),
                Side::Odd if diff[pb] < 0 => push(nb, na, 4),
                Side::Even if diff[pb] == 0 => push(nb, na, 6),
                _ => {}
            }
        }
    }

    // (4t, 4t + 1): the holder of rank 4t rises to 4t + 1.
    boundary_arcs(&mut arcs, &member, &primed_layout, &diff, n, n, 1, Side::Odd);

    Ok(PotGraph { t: ds.t(), arcs })
}

/// Boundary rules for the virtual swap moving `rank` by `step`.
/// `balanced_side` is the side whose membership fires rule 2 on a balanced
/// pair (the move then makes `Σ(odd) − Σ(even)` positive).
#[allow(clippy::too_many_arguments)]
fn boundary_arcs(
    arcs: &mut Vec<PotArc>,
    member: &RankLayout,
    primed: &RankLayout,
    diff: &[i64],
    rank: Rank,
    lower: Rank,
    step: i64,
    balanced_side: Side,
) {
    let (p, side) = member.locate(rank);
    let current = diff[p];
    let rule = if current != 0 {
        let (q, holder_side) = primed.locate(rank);
        let change = step * holder_side.sign();
        (q == p && change.signum() == current.signum()).then_some(1)
    } else {
        (side == balanced_side).then_some(2)
    };
    if let Some(k) = rule {
        arcs.push(PotArc {
            from: p + 1,
            to: 0,
            lower,
            rule: ArcRule::Boundary(k),
        });
    }
}

/// One component's check of `in − out <= |V| + 4(|E| − |V|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCheck {
    pub nodes: Vec<usize>,
    pub vertices: usize,
    pub edges: usize,
    /// `d_in(V) − d_out(V)` from per-node degrees.
    pub degree_balance: i64,
    /// `in(V) − out(V)` from boundary-crossing arcs.
    pub crossing_balance: i64,
    pub bound: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma2Report {
    pub components: Vec<ComponentCheck>,
    pub vertices: usize,
    pub edges: usize,
    /// `d_in(V_swp) − d_out(V_swp)`.
    pub swp_balance: i64,
    /// `swp_balance >= −2`.
    pub slack_holds: bool,
    /// `2|E| >= 3|V|/2 − 1`, checked as `4|E| >= 3|V| − 2`.
    pub eq10_holds: bool,
    /// Total in-degree equals total out-degree over all nodes and `v0` has
    /// no out-arcs and at most two in-arcs.
    pub flow_holds: bool,
}

impl Lemma2Report {
    pub fn components_hold(&self) -> bool {
        self.components.iter().all(|c| c.holds)
    }

    pub fn holds(&self) -> bool {
        self.components_hold() && self.slack_holds && self.eq10_holds && self.flow_holds
    }
}

/// Checks the per-component degree inequality and its global consequences.
pub fn verify_lemma2(ds: &DefiningSet, i_star: &SwapSet) -> Result<Lemma2Report> {
    let swp = build_swp(ds, i_star)?;
    let pot = build_pot(ds, i_star)?;
    Ok(lemma2_report(&swp, &pot))
}

pub fn lemma2_report(swp: &SwpGraph, pot: &PotGraph) -> Lemma2Report {
    let t = swp.t;
    let deg = pot.degrees();
    let components = swp
        .components
        .iter()
        .map(|nodes| {
            let set = NodeSet::of(t, nodes.iter().copied());
            let vertices = nodes.len();
            let edges = swp.edges_within(&set);
            let degree_balance = deg.d_in_of(&set) as i64 - deg.d_out_of(&set) as i64;
            let crossing_balance = pot.arcs_in(&set) as i64 - pot.arcs_out(&set) as i64;
            let bound = vertices as i64 + 4 * (edges as i64 - vertices as i64);
            ComponentCheck {
                nodes: nodes.clone(),
                vertices,
                edges,
                degree_balance,
                crossing_balance,
                bound,
                holds: degree_balance == crossing_balance && crossing_balance <= bound,
            }
        })
        .collect();
    let all = NodeSet::of(t, 1..=t);
    let swp_balance = deg.d_in_of(&all) as i64 - deg.d_out_of(&all) as i64;
    let vertices = t;
    let edges = swp.edges.len();
    let total_in: usize = deg.d_in.iter().sum();
    let total_out: usize = deg.d_out.iter().sum();
    Lemma2Report {
        components,
        vertices,
        edges,
        swp_balance,
        slack_holds: swp_balance >= -2,
        eq10_holds: 4 * edges as i64 >= 3 * vertices as i64 - 2,
        flow_holds: total_in == total_out && deg.d_out[0] == 0 && deg.d_in[0] <= 2,
    }
}

/// Subset families for the `in(V) <= d(V)` check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetFamily {
    Components,
    Singletons,
    /// Every subset of the pair nodes, including the empty one.
    AllSmall,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetCheck {
    pub nodes: Vec<usize>,
    pub arcs_in: usize,
    pub incident_edges: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Prop1Report {
    pub subsets: Vec<SubsetCheck>,
}

impl Prop1Report {
    pub fn holds(&self) -> bool {
        self.subsets.iter().all(|s| s.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SubsetCheck> {
        self.subsets.iter().filter(|s| !s.holds)
    }
}

/// Checks `in(V) <= d(V)` on the requested subset families.
pub fn verify_prop1(ds: &DefiningSet, i_star: &SwapSet, families: &[SubsetFamily]) -> Result<Prop1Report> {
    if families.contains(&SubsetFamily::AllSmall) && ds.t() > ALL_SUBSETS_T_LIMIT {
        return Err(Error::SizeRefused(format!(
            "all-subset check at t={} exceeds t <= {ALL_SUBSETS_T_LIMIT}",
            ds.t()
        )));
    }
    let swp = build_swp(ds, i_star)?;
    let pot = build_pot(ds, i_star)?;
    Ok(prop1_report(&swp, &pot, families))
}

pub fn prop1_report(swp: &SwpGraph, pot: &PotGraph, families: &[SubsetFamily]) -> Prop1Report {
    let t = swp.t;
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for family in families {
        match family {
            SubsetFamily::Components => subsets.extend(swp.components.iter().cloned()),
            SubsetFamily::Singletons => subsets.extend((1..=t).map(|v| vec![v])),
            SubsetFamily::AllSmall => {
                subsets.extend((0u64..1 << t).map(|mask| (1..=t).filter(|v| mask >> (v - 1) & 1 == 1).collect()))
            }
        }
    }
    Prop1Report {
        subsets: subsets
            .into_iter()
            .map(|nodes| {
                let set = NodeSet::of(t, nodes.iter().copied());
                let arcs_in = pot.arcs_in(&set);
                let incident_edges = swp.incident_edges(&set);
                SubsetCheck {
                    nodes,
                    arcs_in,
                    incident_edges,
                    holds: arcs_in <= incident_edges,
                }
            })
            .collect(),
    }
}

/// How a node was treated by the `d + d_out = type + 2` check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop2Status {
    /// In an acyclic component and of type 1 or 2.
    Checked { expected: usize, holds: bool },
    /// A type 3 pair inside an acyclic component.
    Type3InAcyclic,
    /// The node's component has a cycle.
    OutOfRegime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCheck {
    pub node: usize,
    pub pair_type: PairType,
    pub d: usize,
    pub d_out: usize,
    pub status: Prop2Status,
}

impl NodeCheck {
    pub fn sum(&self) -> usize {
        self.d + self.d_out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Prop2Report {
    pub nodes: Vec<NodeCheck>,
}

impl Prop2Report {
    pub fn holds(&self) -> bool {
        self.nodes.iter().all(|n| match n.status {
            Prop2Status::Checked { holds, .. } => holds,
            Prop2Status::Type3InAcyclic => false,
            Prop2Status::OutOfRegime => true,
        })
    }

    pub fn node(&self, v: usize) -> Option<&NodeCheck> {
        self.nodes.iter().find(|n| n.node == v)
    }
}

/// Reports `d(v) + d_out(v)` for every node against `type + 2`.
pub fn verify_prop2(ds: &DefiningSet, i_star: &SwapSet) -> Result<Prop2Report> {
    let swp = build_swp(ds, i_star)?;
    let pot = build_pot(ds, i_star)?;
    let deg = pot.degrees();
    let mut nodes = Vec::with_capacity(ds.t());
    for comp in &swp.components {
        let set = NodeSet::of(ds.t(), comp.iter().copied());
        let acyclic = swp.edges_within(&set) + 1 == comp.len();
        for &v in comp {
            let pair_type = classify_pair(ds.pair(v - 1))?;
            let d = swp.degree(v);
            let d_out = deg.d_out[v];
            let status = match (acyclic, pair_type.number()) {
                (false, _) => Prop2Status::OutOfRegime,
                (true, 3) => Prop2Status::Type3InAcyclic,
                (true, k) => {
                    let expected = usize::from(k) + 2;
                    Prop2Status::Checked {
                        expected,
                        holds: d + d_out == expected,
                    }
                }
            };
            nodes.push(NodeCheck {
                node: v,
                pair_type,
                d,
                d_out,
                status,
            });
        }
    }
    nodes.sort_by_key(|n| n.node);
    Ok(Prop2Report { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> DefiningSet {
        DefiningSet::from_arrays(&[([1, 4], [2, 3])])
    }

    fn optimal_t2() -> DefiningSet {
        DefiningSet::from_arrays(&[([1, 8], [3, 6]), ([2, 7], [4, 5])])
    }

    #[test]
    fn swp_double_edge() {
        let g = build_swp(&optimal_t2(), &SwapSet::from_pairs([(1, 2), (5, 6)]).unwrap()).unwrap();
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().all(|e| (e.a, e.b) == (1, 2)));
        assert_eq!(g.components, vec![vec![1, 2]]);
    }

    #[test]
    fn swp_empty_and_self_loop() {
        let g = build_swp(&optimal_t2(), &SwapSet::empty()).unwrap();
        assert!(g.edges.is_empty());
        assert_eq!(g.components, vec![vec![1], vec![2]]);

        let g = build_swp(&t1(), &SwapSet::from_pairs([(1, 2)]).unwrap()).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].a, g.edges[0].b), (1, 1));
        assert_eq!(g.edges_within(&NodeSet::of(1, [1])), 1);
    }

    #[test]
    fn pot_t1_boundary_arcs() {
        let pot = build_pot(&t1(), &SwapSet::from_pairs([(1, 2)]).unwrap()).unwrap();
        assert_eq!(
            pot.arcs,
            vec![
                PotArc {
                    from: 1,
                    to: 0,
                    lower: 0,
                    rule: ArcRule::Boundary(1)
                },
                PotArc {
                    from: 1,
                    to: 0,
                    lower: 4,
                    rule: ArcRule::Boundary(1)
                },
            ]
        );
        let deg = pot.degrees();
        assert_eq!((deg.d_out[1], deg.d_in[1], deg.d_in[0]), (2, 0, 2));
    }

    #[test]
    fn rank_one_in_even_set_of_balanced_pair() {
        let ds = DefiningSet::from_arrays(&[([2, 3], [1, 4]), ([5, 8], [6, 7])]);
        let pot = build_pot(&ds, &SwapSet::empty()).unwrap();
        assert!(pot.arcs.contains(&PotArc {
            from: 1,
            to: 0,
            lower: 0,
            rule: ArcRule::Boundary(2)
        }));
    }

    #[test]
    fn balanced_conditions_fire_only_on_equal_sums() {
        let ds = crate::construct::base_case();
        for swaps in crate::adversary::enumerate_swap_sets(4).step_by(37) {
            let primed = ds.apply_swaps(&swaps).unwrap();
            for arc in build_pot(&ds, &swaps).unwrap().arcs {
                if matches!(arc.rule, ArcRule::Condition(5 | 6) | ArcRule::Boundary(2)) {
                    assert_eq!(primed.pair(arc.from - 1).difference(), 0);
                }
            }
        }
    }

    #[test]
    fn lemma2_t1() {
        let r = verify_lemma2(&t1(), &SwapSet::from_pairs([(1, 2)]).unwrap()).unwrap();
        assert_eq!(r.components.len(), 1);
        let c = &r.components[0];
        assert_eq!((c.vertices, c.edges, c.bound, c.crossing_balance), (1, 1, 1, -2));
        assert!(r.holds());
    }

    #[test]
    fn prop1_t1_and_all_subsets() {
        let i = SwapSet::from_pairs([(1, 2)]).unwrap();
        let r = verify_prop1(&t1(), &i, &[SubsetFamily::Singletons, SubsetFamily::AllSmall]).unwrap();
        assert_eq!(
            r.subsets[0],
            SubsetCheck {
                nodes: vec![1],
                arcs_in: 0,
                incident_edges: 1,
                holds: true
            }
        );
        let empty = r.subsets.iter().find(|s| s.nodes.is_empty()).unwrap();
        assert_eq!((empty.arcs_in, empty.incident_edges), (0, 0));

        let big = crate::construct::construct_for_z(3).unwrap();
        assert!(matches!(
            verify_prop1(&big, &SwapSet::empty(), &[SubsetFamily::AllSmall]),
            Err(Error::SizeRefused(_))
        ));
    }

    #[test]
    fn primed_membership_changes_only_moved_ranks() {
        let ds = optimal_t2();
        let i = SwapSet::empty();
        assert_eq!(
            build_pot_with(&ds, &i, Membership::Primed).unwrap(),
            build_pot(&ds, &i).unwrap()
        );
    }
}
