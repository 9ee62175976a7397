mod common;

use common::{block_diag, rel_diff, singular_values};
use hbs_core::linalg::{dot, gaussian_matrix};
use hbs_core::{build_tree, flops, random_hbs, DenseMatrix, Hbs, HbsFactorization, Matrix, NodeBlocks, RngSeed};
use proptest::prelude::*;

fn unit(n: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    e
}

/// Dense matrix rebuilt by summing every term of the telescoping expansion
/// explicitly, with block-diagonal level matrices.
fn telescoped(f: &Hbs) -> Matrix {
    let tree = f.tree();
    let level_mats = |level: usize| {
        let nodes = tree.nodes_at_level(level).unwrap();
        let us: Vec<&Matrix> = nodes.iter().map(|n| &f.node_blocks(n.id).u).collect();
        let vs: Vec<&Matrix> = nodes.iter().map(|n| &f.node_blocks(n.id).v).collect();
        let ds: Vec<&Matrix> = nodes.iter().map(|n| &f.node_blocks(n.id).d).collect();
        (block_diag(&us), block_diag(&vs), block_diag(&ds))
    };
    let mut a = f.root_discrepancy().clone();
    for level in 1..=tree.depth() {
        let (u, v, d) = level_mats(level);
        a = u.matmul(&a).matmul_t(&v).add(&d);
    }
    a
}

#[test]
fn expansion_matches_block_diagonal_telescoping() {
    for (n, m, k) in [(37, 5, 2), (64, 8, 3), (200, 30, 6)] {
        let f = random_hbs::<f64>(&build_tree(n, m).unwrap(), k, RngSeed(n as u64)).unwrap();
        let d = f.to_dense().unwrap();
        assert!(rel_diff(&d, &telescoped(&f)) <= 1e-13);
    }
}

#[test]
fn unit_vectors_give_columns_and_rows() {
    let f = random_hbs::<f64>(&build_tree(150, 12).unwrap(), 4, RngSeed(9)).unwrap();
    let dense = f.to_dense().unwrap();
    let scale = dense.norm_fro();
    for j in 0..150 {
        let col = f.apply(&unit(150, j)).unwrap();
        let row = f.apply_transpose(&unit(150, j)).unwrap();
        let col_err: f64 = (0..150).map(|i| (col[i] - dense[(i, j)]).powi(2)).sum::<f64>().sqrt();
        let row_err: f64 = (0..150).map(|i| (row[i] - dense[(j, i)]).powi(2)).sum::<f64>().sqrt();
        assert!(col_err <= 1e-12 * scale, "column {j}: {col_err}");
        assert!(row_err <= 1e-12 * scale, "row {j}: {row_err}");
    }
}

#[test]
fn identity_probe_reproduces_dense() {
    let f = random_hbs::<f64>(&build_tree(90, 10).unwrap(), 3, RngSeed(2)).unwrap();
    let through_apply = f.apply_matrix(&DenseMatrix::identity(90)).unwrap();
    assert!(rel_diff(&through_apply, &f.to_dense().unwrap()) <= 1e-12);
}

#[test]
fn block_apply_matches_single_vectors() {
    let f = random_hbs::<f64>(&build_tree(300, 25).unwrap(), 5, RngSeed(4)).unwrap();
    let q = gaussian_matrix::<f64>(300, 6, RngSeed(4), 9);
    let block = f.apply_matrix(&q).unwrap();
    for j in 0..6 {
        let single = f.apply(q.column(j)).unwrap();
        let err: f64 = single.iter().zip(block.column(j)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = single.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(err <= 1e-13 * norm);
    }
    let one = f.apply_matrix(&q.col_block(0..1)).unwrap();
    assert_eq!(one.as_slice(), f.apply(q.column(0)).unwrap().as_slice());
}

#[test]
fn symmetric_factorization_is_self_adjoint() {
    let f = random_hbs::<f64>(&build_tree(120, 10).unwrap(), 4, RngSeed(6)).unwrap();
    let (tree, r, blocks, root) = f.into_parts();
    let sym = |d: &Matrix| d.add(&d.transpose()).scaled(0.5);
    let blocks = blocks
        .into_iter()
        .map(|b| NodeBlocks { v: b.u.clone(), d: sym(&b.d), u: b.u })
        .collect();
    let s = HbsFactorization::from_parts(tree, r, blocks, sym(&root)).unwrap();
    let q = gaussian_matrix::<f64>(120, 1, RngSeed(6), 1);
    let a = s.apply(q.as_slice()).unwrap();
    let b = s.apply_transpose(q.as_slice()).unwrap();
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let err = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    assert!(err <= 1e-12 * norm);
}

#[test]
fn adjoint_identity_on_many_pairs() {
    let f = random_hbs::<f64>(&build_tree(500, 40).unwrap(), 8, RngSeed(11)).unwrap();
    let fnorm = common::spectral_norm(&f.to_dense().unwrap());
    for t in 0..100 {
        let q = gaussian_matrix::<f64>(500, 1, RngSeed(1000 + t), 0);
        let w = gaussian_matrix::<f64>(500, 1, RngSeed(1000 + t), 1);
        let lhs = dot(w.as_slice(), &f.apply(q.as_slice()).unwrap());
        let rhs = dot(&f.apply_transpose(w.as_slice()).unwrap(), q.as_slice());
        assert!((lhs - rhs).abs() <= 1e-11 * w.norm_fro() * q.norm_fro() * fnorm);
    }
}

#[test]
fn generated_bases_are_orthonormal_and_blocks_low_rank() {
    let tree = build_tree(256, 20).unwrap();
    let k = 5;
    let f = random_hbs::<f64>(&tree, k, RngSeed(13)).unwrap();
    assert!(f.max_basis_defect() <= 1e-10);
    let dense = f.to_dense().unwrap();
    let leaves = tree.leaves();
    for a in leaves {
        for b in leaves {
            if a.id == b.id {
                continue;
            }
            let blk = dense.block(a.range.clone(), b.range.clone());
            let sv = singular_values(&blk);
            assert!(sv[k] <= 1e-12 * sv[0], "leaves {} {}: {:?}", a.id, b.id, &sv[..=k]);
        }
    }
}

#[test]
fn rank_zero_generator_is_block_diagonal() {
    let tree = build_tree(40, 6).unwrap();
    let f = random_hbs::<f64>(&tree, 0, RngSeed(1)).unwrap();
    let dense = f.to_dense().unwrap();
    for a in tree.leaves() {
        for b in tree.leaves() {
            let blk = dense.block(a.range.clone(), b.range.clone());
            if a.id == b.id {
                assert!(blk.norm_fro() > 0.0);
            } else {
                assert_eq!(blk.norm_fro(), 0.0);
            }
        }
    }
}

#[test]
fn generator_is_deterministic() {
    let tree = build_tree(100, 10).unwrap();
    let a = random_hbs::<f64>(&tree, 3, RngSeed(5)).unwrap();
    let b = random_hbs::<f64>(&tree, 3, RngSeed(5)).unwrap();
    let c = random_hbs::<f64>(&tree, 3, RngSeed(6)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn apply_cost_is_linear_in_n() {
    let r = 10;
    for n in [2_000usize, 8_000, 32_000] {
        let f = random_hbs::<f64>(&build_tree(n, 2 * r).unwrap(), r, RngSeed(3)).unwrap();
        let q = vec![1.0; n];
        let (_, madds) = flops::measure(|| f.apply(&q).unwrap());
        assert!(madds as f64 <= 16.0 * (r * r * n) as f64, "n={n}: {madds}");
        let (_, madds_t) = flops::measure(|| f.apply_transpose(&q).unwrap());
        assert_eq!(madds, madds_t);
    }
}

#[test]
fn storage_per_dof_is_flat() {
    let r = 10;
    let per_dof = |n: usize| {
        let f = random_hbs::<f64>(&build_tree(n, 2 * r).unwrap(), r, RngSeed(0)).unwrap();
        let s = f.storage();
        let by_levels: usize = s.levels.iter().map(|l| l.basis_floats + l.discrepancy_floats).sum();
        let by_blocks: usize = f.blocks().iter().map(|b| b.u.len() + b.v.len() + b.d.len()).sum::<usize>()
            + f.root_discrepancy().len();
        assert_eq!(s.total_floats, by_levels);
        assert_eq!(s.total_floats, by_blocks);
        s.floats_per_dof
    };
    // Same leaf size at both points, so the per-dof count is a closed-form function of the depth.
    let (a, b) = (per_dof(1280), per_dof(2560));
    assert!((a / b - 1.0).abs() <= 0.05, "{a} vs {b}");
    let (c, d) = (per_dof(1000), per_dof(10_000));
    assert!((c / d - 1.0).abs() <= 0.10, "{c} vs {d}");
}

#[test]
fn single_precision_apply() {
    let tree = build_tree(200, 20).unwrap();
    let f = random_hbs::<f32>(&tree, 4, RngSeed(8)).unwrap();
    let dense = f.to_dense().unwrap();
    let q = gaussian_matrix::<f32>(200, 2, RngSeed(8), 0);
    let err = f.apply_matrix(&q).unwrap().sub(&dense.matmul(&q)).norm_fro() / dense.matmul(&q).norm_fro();
    assert!(err <= 1e-5, "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_is_linear(n in 20usize..400, k in 1usize..5, seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let tree = build_tree(n, 10.max(k)).unwrap();
        prop_assume!(tree.min_leaf_size() >= k);
        let f = random_hbs::<f64>(&tree, k, RngSeed(seed)).unwrap();
        let q1 = gaussian_matrix::<f64>(n, 1, RngSeed(seed), 7);
        let q2 = gaussian_matrix::<f64>(n, 1, RngSeed(seed), 8);
        let mut comb = q1.scaled(a);
        comb.axpy(b, &q2);
        let lhs = f.apply_matrix(&comb).unwrap();
        let mut rhs = f.apply_matrix(&q1).unwrap().scaled(a);
        rhs.axpy(b, &f.apply_matrix(&q2).unwrap());
        prop_assert!(lhs.sub(&rhs).norm_fro() <= 1e-12 * (rhs.norm_fro() + lhs.norm_fro()).max(1e-300));
    }

    #[test]
    fn apply_matches_dense(n in 20usize..600, k in 1usize..6, seed in 0u64..1000) {
        let tree = build_tree(n, 12).unwrap();
        prop_assume!(tree.min_leaf_size() >= k);
        let f = random_hbs::<f64>(&tree, k, RngSeed(seed)).unwrap();
        let dense = f.to_dense().unwrap();
        let q = gaussian_matrix::<f64>(n, 3, RngSeed(seed), 5);
        prop_assert!(rel_diff(&f.apply_matrix(&q).unwrap(), &dense.matmul(&q)) <= 1e-12);
        prop_assert!(rel_diff(&f.apply_transpose_matrix(&q).unwrap(), &dense.t_matmul(&q)) <= 1e-12);
    }
}
