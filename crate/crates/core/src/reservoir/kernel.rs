use nalgebra::DMatrix;

/// Rank of the column-standardized observable matrix: singular values above
/// `eps`. Constant columns (std ≤ 1e-10·(1 + max|column|)) are dropped first.
pub fn kernel_quality(matrix: &DMatrix<f64>, eps: f64) -> usize {
    let rows = matrix.nrows();
    if rows == 0 {
        return 0;
    }
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for col in matrix.column_iter() {
        let mean = col.mean();
        let sd = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / rows as f64).sqrt();
        if sd > 1e-10 * (1.0 + col.amax()) {
            kept.push(col.iter().map(|x| (x - mean) / sd).collect());
        }
    }
    if kept.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows, kept.len(), |i, j| kept[j][i]);
    m.singular_values().iter().filter(|&&s| s > eps).count()
}
