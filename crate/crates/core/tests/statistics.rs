use qrgg::experiment::{run_experiment_with_jobs, run_trial, Preset};
use qrgg::{ConnectionModel, ConnectivityGraph, ExperimentConfig, Seed, SOURCE};

fn correlation(xs: &[bool], ys: &[bool]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().filter(|&&x| x).count() as f64 / n;
    let my = ys.iter().filter(|&&y| y).count() as f64 / n;
    let both = xs.iter().zip(ys).filter(|(&x, &y)| x && y).count() as f64 / n;
    (both - mx * my) / (mx * (1.0 - mx) * my * (1.0 - my)).sqrt()
}

#[test]
fn links_sharing_the_source_are_uncorrelated() {
    let model = ConnectionModel::fixed(0.1, 0.2, 0.5).unwrap();
    let (mut sa, mut sb) = (Vec::new(), Vec::new());
    for draw in 0..10_000 {
        let g = ConnectivityGraph::build(4, 1, &model, Seed(draw)).unwrap();
        sa.push(g.capacity(SOURCE, 1) == 1);
        sb.push(g.capacity(SOURCE, 2) == 1);
    }
    let rho = correlation(&sa, &sb);
    assert!(rho.abs() <= 0.03, "correlation {rho}");
}

#[test]
fn triangles_close_more_often_than_single_links() {
    let model = ConnectionModel::fixed(0.2, 0.3, 1.0).unwrap();
    let (mut vw, mut two_paths, mut closed) = (0usize, 0usize, 0usize);
    let draws = 10_000;
    for draw in 0..draws {
        let g = ConnectivityGraph::build(3, 1, &model, Seed(draw)).unwrap();
        let link_vw = g.capacity(2, 3) == 1;
        vw += usize::from(link_vw);
        if g.capacity(1, 2) == 1 && g.capacity(1, 3) == 1 {
            two_paths += 1;
            closed += usize::from(link_vw);
        }
    }
    let conditional = closed as f64 / two_paths as f64;
    let marginal = vw as f64 / draws as f64;
    assert!(two_paths > 100);
    assert!(conditional > marginal, "conditional {conditional} vs marginal {marginal}");
}

#[test]
fn fig3_single_trial_is_bounded_by_source_degree() {
    let config: ExperimentConfig = Preset::Fig3.config(3, 77);
    for i in 0..3 {
        let t = run_trial(&config, i).unwrap();
        assert!(t.capacity <= t.cuts[0].1);
        assert!(t.capacity <= 30);
    }
}

/// Reference band from an independent max-flow simulation of the same model
/// (Python, networkx): 11.13 +/- 0.18 over 400 draws.
#[test]
fn fig4_mean_matches_independent_simulation() {
    let mut config: ExperimentConfig = Preset::Fig4.config(500, 4);
    config.p_prime_samples = 10_000;
    let result = run_experiment_with_jobs(&config, 0).unwrap();
    assert!((10.41..=11.85).contains(&result.mean), "mean {}", result.mean);
    assert_eq!(result.histogram.counts.iter().sum::<u64>(), 500);
    let recomputed = result.per_trial_capacity.iter().sum::<u64>() as f64 / 500.0;
    assert_eq!(recomputed, result.mean);
}
