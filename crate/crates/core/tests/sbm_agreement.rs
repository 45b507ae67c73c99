//! Cross-pipeline agreement on an easy planted graph: every directed
//! pipeline should essentially agree with the ground truth and each other.

use flowclust_core::eval::agreement_matrix;
use flowclust_core::graph::{bibliometric_symmetrize, simple_symmetrize};
use flowclust_core::spectral::{
    cdl_cluster, randwalk_cluster, spectral_cluster, svd_cluster, CdlConfig, LaplacianVariant,
    LatentDim, RandWalkConfig, SpectralConfig, SvdConfig,
};
use flowclust_core::synth::{generate_sbm, SbmSpec};

#[test]
fn directed_pipelines_agree_on_easy_sbm() {
    let (g, truth) = generate_sbm(&SbmSpec::unit(vec![30, 30], 0.6, 0.03, 3)).unwrap();
    let k = 2;
    let seed = 3;
    let restarts = 10;

    let mut named = vec![("truth".to_string(), truth)];
    let simple = simple_symmetrize(&g);
    named.push((
        "simple-sym".into(),
        spectral_cluster(
            simple.weights(),
            &SpectralConfig { k, variant: LaplacianVariant::Normalized, seed, restarts },
        )
        .unwrap()
        .partition,
    ));
    let biblio = bibliometric_symmetrize(&g);
    named.push((
        "bibliometric".into(),
        spectral_cluster(
            biblio.weights(),
            &SpectralConfig { k, variant: LaplacianVariant::Normalized, seed, restarts },
        )
        .unwrap()
        .partition,
    ));
    named.push((
        "cdl".into(),
        cdl_cluster(g.weights(), &CdlConfig { k, teleport: 0.0, seed, restarts })
            .unwrap()
            .partition,
    ));
    named.push((
        "svd".into(),
        svd_cluster(
            g.weights(),
            &SvdConfig { k, latent: LatentDim::Auto, seed, restarts },
        )
        .unwrap()
        .partition,
    ));
    named.push((
        "randwalk".into(),
        randwalk_cluster(g.weights(), &RandWalkConfig { k, teleport: 0.0, seed, restarts })
            .unwrap()
            .partition,
    ));

    let table = agreement_matrix(&named).unwrap();
    for (i, row) in table.values.iter().enumerate() {
        for (j, &ari) in row.iter().enumerate() {
            assert!(
                ari >= 0.9,
                "{} vs {}: ARI {ari} below 0.9",
                table.names[i],
                table.names[j]
            );
        }
        assert_eq!(row[i], 1.0);
    }
}
