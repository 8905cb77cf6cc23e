use fbx_core::window_design::{
    design_pqmf_prototype, dtft_magnitude, hamming_window, read_window, reconstruction_residual,
    write_window, WindowSidecar,
};
use fbx_core::{DesignOptions, FrequencyGrid, PrototypeWindow};

#[test]
fn design_is_deterministic_per_seed() {
    let opts = DesignOptions { seed: 9, ..DesignOptions::default() };
    let (a, ra) = design_pqmf_prototype(8, 4, &opts).unwrap();
    let (b, rb) = design_pqmf_prototype(8, 4, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    let (c, _) = design_pqmf_prototype(8, 4, &DesignOptions { seed: 10, ..opts }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn objective_trace_never_increases() {
    let (_, r) = design_pqmf_prototype(8, 8, &DesignOptions::default()).unwrap();
    assert!(!r.objective_trace.is_empty());
    assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.converged);
}

#[test]
fn design_beats_scaled_hamming() {
    for (n, l) in [(4, 4), (8, 8), (16, 4), (4, 8)] {
        let (w, _) = design_pqmf_prototype(n, l, &DesignOptions::default()).unwrap();
        let grid = FrequencyGrid::for_design(n, l, 16).unwrap();
        let ham = PrototypeWindow::new(hamming_window(n * l).unwrap(), n, l)
            .unwrap()
            .normalized_to_passband(&grid)
            .unwrap();
        let rw = reconstruction_residual(&w, &grid).unwrap();
        let rh = reconstruction_residual(&ham, &grid).unwrap();
        assert!(rw.final_objective < rh.final_objective, "N={n} L={l}");
        assert!(rw.passband_max_deviation < rh.passband_max_deviation, "N={n} L={l}");
        if l == 8 {
            assert!(rw.stopband_energy < rh.stopband_energy, "N={n} L={l}");
        }
    }
}

#[test]
fn window_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.win");
    let opts = DesignOptions::default();
    let (w, r) = design_pqmf_prototype(4, 4, &opts).unwrap();
    write_window(&path, &w, &WindowSidecar::from_design(&w, &opts, &r)).unwrap();
    let (back, side) = read_window(&path).unwrap();
    assert_eq!(back, w);
    assert_eq!(side.options, Some(opts));
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 16 * 8);

    std::fs::write(&path, [0u8; 12]).unwrap();
    assert!(read_window(&path).is_err());
}

#[test]
fn dtft_of_delayed_impulse_is_flat() {
    let grid = FrequencyGrid::linear(4, std::f64::consts::PI, 33).unwrap();
    let mut h = vec![0.0; 16];
    h[5] = 2.5;
    for m in dtft_magnitude(&h, &grid).unwrap() {
        assert!((m - 2.5).abs() < 1e-12);
    }
}
