use nalgebra::{DMatrix, SymmetricEigen};
use netpeace_core::projection::{project_2d, row_covariance};
use netpeace_core::EmbeddingMatrix;
use proptest::prelude::*;

fn matrix(rows: usize, dim: usize) -> impl Strategy<Value = EmbeddingMatrix> {
    prop::collection::vec(-3.0f64..3.0, rows * dim)
        .prop_map(move |v| EmbeddingMatrix::from_values(rows, dim, v).unwrap())
}

fn shaped() -> impl Strategy<Value = EmbeddingMatrix> {
    (3usize..50, 2usize..9).prop_flat_map(|(r, d)| matrix(r, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn axis_variances_are_the_top_eigenvalues(emb in shaped()) {
        let p = project_2d(&emb).unwrap();
        let (cov, _) = row_covariance(&emb);
        let d = emb.dim();
        let mut oracle: Vec<f64> = SymmetricEigen::new(DMatrix::from_row_slice(d, d, &cov)).eigenvalues.iter().copied().collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let scale = oracle[0].max(1.0);
        prop_assert!((p.variances[0] - oracle[0]).abs() < 1e-9 * scale);
        prop_assert!((p.variances[1] - oracle[1]).abs() < 1e-9 * scale);

        let n = emb.rows() as f64;
        for k in 0..2 {
            let mean: f64 = p.points.iter().map(|q| q[k]).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            let var: f64 = p.points.iter().map(|q| q[k] * q[k]).sum::<f64>() / (n - 1.0);
            prop_assert!((var - oracle[k]).abs() < 1e-9 * scale);
            let first = p.axes[k].iter().find(|x| x.abs() > 1e-12).unwrap();
            prop_assert!(*first > 0.0);
        }
    }

    #[test]
    fn duplicate_rows_share_coordinates(emb in shaped()) {
        let (n, d) = (emb.rows(), emb.dim());
        let mut values = emb.values().to_vec();
        values.extend_from_slice(emb.row(0));
        let p = project_2d(&EmbeddingMatrix::from_values(n + 1, d, values).unwrap()).unwrap();
        prop_assert_eq!(p.points[0], p.points[n]);
    }
}

#[test]
fn tsv_has_one_line_per_row() {
    let emb = EmbeddingMatrix::from_values(3, 2, vec![0.0, 1.0, 2.0, 0.5, -1.0, 3.0]).unwrap();
    let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let mut out = Vec::new();
    project_2d(&emb).unwrap().write_tsv(&labels, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("a\t"));
    assert!(project_2d(&emb).unwrap().write_tsv(&labels[..2], Vec::new()).is_err());
}
