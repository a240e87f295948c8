//! Values computed once by the independent oracles below and frozen here.
//! Each test recomputes with both the oracle and the library.

use pfgr_core::generate::{gen_kcnf, gen_ov, gen_partial_ktree, rng_from_seed};
use pfgr_core::twdiam::centroid_bag;
use pfgr_core::{
    diameter_brute, diameter_td, ov_brute, ov_graph_decomposition, ov_to_diameter, sat_brute, sat_to_ov,
    solve_ov_via_diameter, validate_td, CnfInstance, LabeledGraph, OvInstance, TreeDecomposition,
};
use rand::Rng;

/// All-pairs shortest paths on a dense matrix.
fn floyd_warshall_diameter(g: &LabeledGraph) -> u64 {
    let n = g.vertex_count();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.weight);
        d[e.v][e.u] = d[e.v][e.u].min(e.weight);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.iter().flatten().copied().max().unwrap_or(0)
}

fn naive_ov(inst: &OvInstance) -> bool {
    inst.set_a()
        .iter()
        .any(|a| inst.set_b().iter().any(|b| a.bits().iter().zip(b.bits()).all(|(&x, &y)| !(x && y))))
}

fn naive_sat(cnf: &CnfInstance) -> bool {
    let n = cnf.num_vars();
    (0u64..1 << n).any(|mask| {
        cnf.clauses().iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = mask >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    })
}

/// Bag whose removal leaves the smallest largest component; ties go to the
/// smaller index.
fn exhaustive_centroid(td: &TreeDecomposition) -> usize {
    let adj = td.bag_adjacency();
    let k = td.bag_count();
    let worst = |removed: usize| {
        let mut seen = vec![false; k];
        seen[removed] = true;
        let mut worst = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut size = 0;
            while let Some(b) = stack.pop() {
                size += 1;
                for &c in &adj[b] {
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
            worst = worst.max(size);
        }
        worst
    };
    (0..k).min_by_key(|&b| (worst(b), b)).unwrap()
}

fn seed5_tree() -> TreeDecomposition {
    let mut rng = rng_from_seed(5);
    let k = 31;
    let edges: Vec<(usize, usize)> = (1..k).map(|i| (rng.random_range(0..i), i)).collect();
    TreeDecomposition::new((0..k).map(|i| vec![i]).collect(), edges)
}

const OV_50_6_SEED7_ORTHOGONAL: bool = true;
const KCNF_12_40_SEED3_SATISFIABLE: bool = true;
const KTREE_60_3_SEED11_DIAMETER: u64 = 5;
const SEED5_TREE_CENTROID: usize = 0;

#[test]
fn ov_50_6_seed7() {
    let inst = gen_ov(50, 6, false, 7).unwrap();
    assert_eq!(naive_ov(&inst), OV_50_6_SEED7_ORTHOGONAL);
    assert_eq!(ov_brute(&inst).is_some(), OV_50_6_SEED7_ORTHOGONAL);
    let report = solve_ov_via_diameter(&inst, &Default::default()).unwrap();
    assert_eq!(report.orthogonal, OV_50_6_SEED7_ORTHOGONAL);
    let (g, _) = ov_to_diameter(&inst);
    assert_eq!(floyd_warshall_diameter(&g), if OV_50_6_SEED7_ORTHOGONAL { 3 } else { 2 });
}

#[test]
fn kcnf_12_40_seed3() {
    let cnf = gen_kcnf(12, 40, 3, 3).unwrap();
    assert_eq!(naive_sat(&cnf), KCNF_12_40_SEED3_SATISFIABLE);
    assert_eq!(sat_brute(&cnf).unwrap().is_some(), KCNF_12_40_SEED3_SATISFIABLE);
    let (ov, _) = sat_to_ov(&cnf).unwrap();
    assert_eq!(naive_ov(&ov), KCNF_12_40_SEED3_SATISFIABLE);
}

#[test]
fn ktree_60_3_seed11() {
    let (g, td) = gen_partial_ktree(60, 3, 0.6, 11).unwrap();
    assert_eq!(floyd_warshall_diameter(&g), KTREE_60_3_SEED11_DIAMETER);
    assert_eq!(diameter_brute(&g).unwrap(), KTREE_60_3_SEED11_DIAMETER);
    assert_eq!(diameter_td(&g, &td).unwrap(), KTREE_60_3_SEED11_DIAMETER);
}

#[test]
fn seed5_tree_centroid() {
    let td = seed5_tree();
    let all: Vec<usize> = (0..td.bag_count()).collect();
    assert_eq!(exhaustive_centroid(&td), SEED5_TREE_CENTROID);
    assert_eq!(centroid_bag(&td, &all).unwrap(), SEED5_TREE_CENTROID);
}

#[test]
fn ov_40_5_decomposition_width() {
    let inst = gen_ov(40, 5, true, 0).unwrap();
    let (g, _) = ov_to_diameter(&inst);
    let report = validate_td(&g, &ov_graph_decomposition(&inst));
    assert!(report.is_valid(), "{report}");
    assert_eq!(report.width, 6);
    assert_eq!(g.vertex_count(), 40 + 40 + 5 + 2);
    assert_eq!(floyd_warshall_diameter(&g), 3);
}
