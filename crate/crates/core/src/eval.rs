//! Partition-agreement metrics: adjusted Rand index and normalized mutual
//! information, plus the pairwise agreement table.

use crate::error::{Error, Result};
use crate::partition::{Partition, UNASSIGNED};

/// Agreement between two partitions over the same nodes. Nodes carrying the
/// reserved label in either partition are excluded and counted.
#[derive(Debug, Clone)]
pub struct AgreementReport {
    pub ari: f64,
    pub nmi: f64,
    pub contingency: Vec<Vec<u64>>,
    pub excluded: usize,
}

/// Pairwise ARI table over named partitions.
#[derive(Debug, Clone)]
pub struct AgreementMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

fn contingency_table(a: &Partition, b: &Partition) -> Result<(Vec<Vec<u64>>, usize)> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "partition length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let keep: Vec<usize> = (0..a.len())
        .filter(|&i| a.labels()[i] != UNASSIGNED && b.labels()[i] != UNASSIGNED)
        .collect();
    let excluded = a.len() - keep.len();

    let mut a_ids: Vec<i32> = keep.iter().map(|&i| a.labels()[i]).collect();
    a_ids.sort_unstable();
    a_ids.dedup();
    let mut b_ids: Vec<i32> = keep.iter().map(|&i| b.labels()[i]).collect();
    b_ids.sort_unstable();
    b_ids.dedup();

    let mut table = vec![vec![0u64; b_ids.len()]; a_ids.len()];
    for &i in &keep {
        let r = a_ids.binary_search(&a.labels()[i]).unwrap();
        let c = b_ids.binary_search(&b.labels()[i]).unwrap();
        table[r][c] += 1;
    }
    Ok((table, excluded))
}

fn comb2(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

fn ari_from_table(table: &[Vec<u64>]) -> f64 {
    let row_sums: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_count = table.first().map_or(0, Vec::len);
    let col_sums: Vec<u64> = (0..col_count)
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let n: u64 = row_sums.iter().sum();

    let index: f64 = table.iter().flatten().map(|&x| comb2(x)).sum();
    let sum_a: f64 = row_sums.iter().map(|&x| comb2(x)).sum();
    let sum_b: f64 = col_sums.iter().map(|&x| comb2(x)).sum();
    let total_pairs = comb2(n);
    if total_pairs <= 0.0 {
        return 1.0; // zero or one node: nothing to disagree about
    }
    let expected = sum_a * sum_b / total_pairs;
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom.abs() < 1e-12 {
        // both partitions degenerate in the same direction (all-singletons
        // or all-in-one); identical by construction
        return 1.0;
    }
    (index - expected) / denom
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn nmi_from_table(table: &[Vec<u64>]) -> f64 {
    let row_sums: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_count = table.first().map_or(0, Vec::len);
    let col_sums: Vec<u64> = (0..col_count)
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let n: u64 = row_sums.iter().sum();
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let h_a = entropy(&row_sums, nf);
    let h_b = entropy(&col_sums, nf);
    if h_a <= 0.0 && h_b <= 0.0 {
        return 1.0; // both single-cluster
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = c as f64 / nf;
            mi += p * (p * nf * nf / (row_sums[i] as f64 * col_sums[j] as f64)).ln();
        }
    }
    let nmi = mi / (0.5 * (h_a + h_b));
    nmi.clamp(0.0, 1.0)
}

/// Chance-corrected pair-counting agreement; 1 for identical partitions up
/// to relabeling.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    let (table, _) = contingency_table(a, b)?;
    Ok(ari_from_table(&table))
}

/// Mutual information normalized by the arithmetic mean of the entropies;
/// 1.0 by convention when both entropies vanish.
pub fn normalized_mutual_information(a: &Partition, b: &Partition) -> Result<f64> {
    let (table, _) = contingency_table(a, b)?;
    Ok(nmi_from_table(&table))
}

pub fn agreement_report(a: &Partition, b: &Partition) -> Result<AgreementReport> {
    let (table, excluded) = contingency_table(a, b)?;
    Ok(AgreementReport {
        ari: ari_from_table(&table),
        nmi: nmi_from_table(&table),
        contingency: table,
        excluded,
    })
}

/// Symmetric table of pairwise ARI values, diagonal 1.
pub fn agreement_matrix(partitions: &[(String, Partition)]) -> Result<AgreementMatrix> {
    let m = partitions.len();
    let mut values = vec![vec![1.0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let ari = adjusted_rand_index(&partitions[i].1, &partitions[j].1)?;
            values[i][j] = ari;
            values[j][i] = ari;
        }
    }
    Ok(AgreementMatrix {
        names: partitions.iter().map(|(n, _)| n.clone()).collect(),
        values,
    })
}
