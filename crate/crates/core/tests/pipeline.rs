use mppi_guidance::engagement::{Param, TerminalConfig};
use mppi_guidance::neural::{INPUT_DIM, LOS_RATE, STATE_FEATURES};
use mppi_guidance::pipeline::{
    collect, export_csv, load_dataset, preprocess, save_dataset, CollectionConfig, Dataset, DatasetMeta,
    PreprocessConfig,
};
use mppi_guidance::Error;

fn small_config() -> CollectionConfig {
    CollectionConfig {
        terminal: TerminalConfig {
            max_time: 1.5,
            ..TerminalConfig::default()
        },
        ..CollectionConfig::default()
    }
}

/// `len` rows per trajectory with LOS rates `k·t` and otherwise arbitrary
/// features.
fn synthetic(lengths: &[usize], k: [f64; 2], dt: f64) -> Dataset {
    let mut time = Vec::new();
    let mut features = Vec::new();
    for &len in lengths {
        for i in 0..len {
            let t = i as f64 * dt;
            let mut row: Vec<f64> = (0..INPUT_DIM)
                .map(|j| (j as f64 + 1.0) * (1.0 + t).ln() + 3.0)
                .collect();
            row[LOS_RATE] = k[0] * t;
            row[LOS_RATE + 1] = k[1] * t;
            time.push(t);
            features.extend(row);
        }
    }
    Dataset {
        time,
        features,
        trajectory_lengths: lengths.to_vec(),
        meta: DatasetMeta {
            seed: 0,
            config_hash: String::new(),
            discarded: 0,
            dt,
        },
    }
}

#[test]
fn collection_is_deterministic_and_bounded_in_time() {
    let cfg = small_config();
    let a = collect(&cfg, 3, 17).unwrap();
    let b = collect(&cfg, 3, 17).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, collect(&cfg, 3, 18).unwrap());
    assert!(a.time.iter().all(|&t| t <= cfg.terminal.max_time + cfg.dt));
    assert_eq!(a.trajectory_lengths.iter().sum::<usize>(), a.len());
    assert_eq!(a.meta.config_hash, mppi_guidance::pipeline::config_hash(&cfg));
}

#[test]
fn random_controls_are_zero_mean() {
    let cfg = CollectionConfig {
        terminal: TerminalConfig {
            max_time: 2.0,
            ..TerminalConfig::default()
        },
        min_record_range: 0.0,
        ..CollectionConfig::default()
    };
    let ds = collect(&cfg, 300, 5).unwrap();
    let mut sums = [0.0; 2];
    for i in 0..ds.len() {
        let row = ds.row(i);
        sums[0] += row[STATE_FEATURES];
        sums[1] += row[STATE_FEATURES + 1];
    }
    let n = ds.len() as f64;
    assert!(n >= 1e5, "only {n} steps");
    // Saturation at 200 m/s² clips both tails symmetrically, so σ stays an upper bound.
    for s in sums {
        assert!((s / n).abs() < 3.0 * cfg.control_sigma / n.sqrt(), "mean {}", s / n);
    }
}

#[test]
fn invalid_collection_configs_are_rejected() {
    assert!(matches!(collect(&small_config(), 0, 0), Err(Error::Config(_))));
    let cfg = CollectionConfig {
        aimed_fraction: 1.5,
        ..small_config()
    };
    assert!(matches!(collect(&cfg, 1, 0), Err(Error::Config(_))));
    let cfg = CollectionConfig {
        aimed_range: Param::uniform(-10.0, 100.0),
        ..small_config()
    };
    assert!(matches!(collect(&cfg, 1, 0), Err(Error::Config(_))));
}

#[test]
fn linear_rate_differences_to_constant_targets() {
    let (k, dt) = ([0.37, -1.9], 0.005);
    let ds = synthetic(&[40, 25], k, dt);
    let set = preprocess(
        &ds,
        &PreprocessConfig {
            noise_fraction: 0.0,
            ..PreprocessConfig::default()
        },
        0,
    )
    .unwrap();
    assert_eq!(set.len(), 39 + 24);
    for t in set.targets.chunks_exact(2) {
        assert!((t[0] - k[0] * dt).abs() < 1e-12);
        assert!((t[1] - k[1] * dt).abs() < 1e-12);
    }
}

#[test]
fn no_transition_crosses_a_trajectory_boundary() {
    let ds = synthetic(&[2, 1, 5, 3], [1.0, 1.0], 0.005);
    let recs: Vec<_> = ds.transitions().collect();
    assert_eq!(recs.len(), 1 + 0 + 4 + 2);
    let per: Vec<usize> = recs.iter().map(|r| r.trajectory).collect();
    assert_eq!(per, vec![0, 2, 2, 2, 2, 3, 3]);
    // Every target comes from within one trajectory, where q̇ restarts at 0.
    assert!(recs.iter().all(|r| (r.target[0] - 0.005).abs() < 1e-12));
}

#[test]
fn augmentation_touches_state_features_only() {
    let ds = collect(&small_config(), 2, 3).unwrap();
    let clean = preprocess(
        &ds,
        &PreprocessConfig {
            noise_fraction: 0.0,
            ..PreprocessConfig::default()
        },
        9,
    )
    .unwrap();
    let noisy = preprocess(&ds, &PreprocessConfig::default(), 9).unwrap();
    assert_eq!(clean.targets, noisy.targets);
    assert_eq!(clean.trajectory, noisy.trajectory);
    for (a, b) in clean
        .inputs
        .chunks_exact(INPUT_DIM)
        .zip(noisy.inputs.chunks_exact(INPUT_DIM))
    {
        assert_eq!(a[STATE_FEATURES..], b[STATE_FEATURES..]);
        assert!(a[..STATE_FEATURES]
            .iter()
            .zip(&b[..STATE_FEATURES])
            .any(|(x, y)| x != y));
    }
    assert_eq!(preprocess(&ds, &PreprocessConfig::default(), 9).unwrap(), noisy);

    let z = noisy.normalizer.input.normalize_rows(&noisy.inputs);
    for j in 0..INPUT_DIM {
        let mean: f64 = z.iter().skip(j).step_by(INPUT_DIM).sum::<f64>() / noisy.len() as f64;
        assert!(mean.abs() < 1e-10, "feature {j} mean {mean}");
    }
}

#[test]
fn empty_dataset_is_an_error() {
    let ds = synthetic(&[1, 1], [0.0, 0.0], 0.005);
    assert!(matches!(
        preprocess(&ds, &PreprocessConfig::default(), 0),
        Err(Error::EmptyDataset)
    ));
}

#[test]
fn dataset_round_trip_and_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let ds = collect(&small_config(), 2, 8).unwrap();
    let path = dir.path().join("d.mgd");
    save_dataset(&path, &ds).unwrap();
    let back = load_dataset(&path).unwrap();
    assert_eq!(back, ds);
    let bits = |d: &Dataset| d.features.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back), bits(&ds));

    let csv = dir.path().join("d.csv");
    export_csv(&csv, &ds).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), INPUT_DIM + 2);
    assert_eq!(lines.count(), ds.len());
}

#[test]
fn damaged_dataset_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synthetic(&[4, 3], [0.1, 0.2], 0.005);
    let path = dir.path().join("d.mgd");
    save_dataset(&path, &ds).unwrap();
    let bytes = std::fs::read(&path).unwrap();

    let cut = dir.path().join("cut.mgd");
    std::fs::write(&cut, &bytes[..bytes.len() - 5]).unwrap();
    assert!(matches!(load_dataset(&cut), Err(Error::Corrupt { .. })));

    let longer = dir.path().join("long.mgd");
    let mut extra = bytes.clone();
    extra.extend_from_slice(&[0; 8]);
    std::fs::write(&longer, &extra).unwrap();
    assert!(matches!(load_dataset(&longer), Err(Error::Corrupt { .. })));

    let foreign = dir.path().join("foreign.mgd");
    std::fs::write(&foreign, b"PK\x03\x04 not a dataset").unwrap();
    assert!(matches!(load_dataset(&foreign), Err(Error::VersionMismatch { .. })));

    let future = dir.path().join("future.mgd");
    let mut bumped = bytes.clone();
    assert_eq!(&bumped[..8], b"MGDATA 1");
    bumped[7] = b'9';
    std::fs::write(&future, &bumped).unwrap();
    assert!(matches!(load_dataset(&future), Err(Error::VersionMismatch { .. })));

    assert!(matches!(
        load_dataset(&dir.path().join("missing.mgd")),
        Err(Error::Io { .. })
    ));
}
