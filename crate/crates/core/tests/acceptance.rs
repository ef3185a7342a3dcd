//! Acceptance gate. Each check prints a single `criterion N ... PASS|FAIL`
//! line; the process fails if any criterion does.

mod support;

use std::collections::HashSet;
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use fcg::appearance::{cosine_distance, tracklet_distance};
use fcg::clustering::{cluster, linkage, CondensedMatrix, ConstraintSet};
use fcg::geometry::{box_displacement, extrapolate, iou_distance};
use fcg::metrics::{id_switches, idf1, identity_counts};
use fcg::mot::{self, SequenceInput};
use fcg::pipeline;
use fcg::synth::{self, MotionModel, SynthConfig};
use fcg::types::elementwise_median;
use fcg::weighting::{combine, spatial_weights, temporal_weight, weighted_distance, PairContext};
use fcg::{BBox, Detection, FcgConfig, TrackPoint, TrackSet, Tracklet};

use support::brute_force_upgma;

static LAST_REPORTED: AtomicU32 = AtomicU32::new(0);

fn report(id: u32, name: &str, pass: bool, detail: String) {
    LAST_REPORTED.store(id, Ordering::SeqCst);
    println!("criterion {id} [{name}]: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn config_for(scene: &SynthConfig) -> FcgConfig {
    FcgConfig {
        feature_dim: scene.feature_dim,
        ..FcgConfig::default()
    }
}

fn criterion3_scene() -> SynthConfig {
    SynthConfig {
        num_identities: 10,
        num_frames: 300,
        feature_noise_sigma: 0.02,
        motion_model: MotionModel::Linear,
        seed: 1,
        ..SynthConfig::default()
    }
}

fn criterion6_scene() -> SynthConfig {
    SynthConfig {
        num_identities: 5,
        num_frames: 300,
        feature_noise_sigma: 0.05,
        seed: 3,
        ..SynthConfig::default()
    }
}

const LOW_FPS_RATIOS: [u32; 3] = [2, 5, 10];

fn criterion_1_constrained_upgma_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut agree = 0;
    let trials = 1000;
    for _ in 0..trials {
        let n = rng.random_range(1..=12usize);
        let mut dist = vec![vec![0.0; n]; n];
        let mut condensed = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d: f64 = rng.random_range(0.0..1.0);
                dist[i][j] = d;
                dist[j][i] = d;
                condensed.push(d);
            }
        }
        let density: f64 = rng.random_range(0.0..=0.3);
        let mut pairs = HashSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(density) {
                    pairs.insert((i, j));
                }
            }
        }
        let threshold: f64 = rng.random_range(0.01..=1.0);
        let constraints: ConstraintSet = pairs.iter().copied().collect();
        let got = linkage(&CondensedMatrix::new(n, condensed).unwrap(), &constraints).cut(threshold);
        let want = brute_force_upgma(&dist, &pairs, threshold);
        if got == want {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = agree == trials && elapsed < Duration::from_secs(10);
    report(1, "constrained UPGMA oracle", pass, format!("{agree}/{trials} agree in {elapsed:.2?}"));
    assert!(pass);
}

/// Every worked example from the operation contracts, at 1e-9.
fn criterion_2_formula_unit_suite() {
    let start = Instant::now();
    let tol = 1e-9;
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, got: f64, want: f64| {
        if !((got - want).abs() <= tol) {
            failures.push(format!("{name}: got {got}, want {want}"));
        }
    };
    let bx = |x: f64, y: f64, w: f64, h: f64| BBox::new(x, y, w, h).unwrap();
    let det = |frame: u32, f: &[f32], b: BBox| Detection::new(frame, b, 1.0, f.to_vec(), frame as usize).unwrap();
    let unit = bx(0.0, 0.0, 50.0, 100.0);

    // tracklet median
    let t = Tracklet::new(vec![det(1, &[0.6, 0.8], unit)]).unwrap();
    check("median single x", t.median_feature()[0], f64::from(0.6f32));
    check("median single y", t.median_feature()[1], f64::from(0.8f32));
    let t = Tracklet::new(vec![det(1, &[0.0, 1.0], unit), det(2, &[1.0, 0.0], unit), det(3, &[1.0, 1.0], unit)]).unwrap();
    check("median odd x", t.median_feature()[0], 1.0);
    check("median odd y", t.median_feature()[1], 1.0);
    let rows: [&[f32]; 2] = [&[0.0, 0.0], &[2.0, 4.0]];
    let m = elementwise_median(rows).unwrap();
    check("median even x", m[0], 1.0);
    check("median even y", m[1], 2.0);

    // geometry
    check("iou identical", iou_distance(&bx(0., 0., 10., 10.), &bx(0., 0., 10., 10.)), 0.0);
    check("iou disjoint", iou_distance(&bx(0., 0., 1., 1.), &bx(5., 5., 1., 1.)), 1.0);
    check("iou partial", iou_distance(&bx(0., 0., 2., 2.), &bx(1., 1., 2., 2.)), 6.0 / 7.0);
    check("d_box identical", box_displacement(&bx(3., 7., 10., 20.), &bx(3., 7., 10., 20.)), 0.0);
    check("d_box horizontal", box_displacement(&bx(0., 0., 10., 10.), &bx(5., 0., 10., 10.)), 0.5);
    check("d_box vertical", box_displacement(&bx(0., 0., 10., 10.), &bx(0., 5., 10., 10.)), 0.5);
    for (name, prev, curr, steps, want) in [
        ("extrapolate still", bx(4., 4., 8., 8.), bx(4., 4., 8., 8.), 5, bx(4., 4., 8., 8.)),
        ("extrapolate linear", bx(0., 0., 10., 10.), bx(2., 0., 10., 10.), 3, bx(8., 0., 10., 10.)),
        ("extrapolate size", bx(0., 0., 10., 10.), bx(1., 1., 12., 10.), 2, bx(3., 3., 16., 10.)),
    ] {
        let got = extrapolate(&prev, &curr, steps);
        check(&format!("{name} x"), got.x, want.x);
        check(&format!("{name} y"), got.y, want.y);
        check(&format!("{name} w"), got.w, want.w);
        check(&format!("{name} h"), got.h, want.h);
    }

    // appearance
    check("cos identical", cosine_distance(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
    check("cos orthogonal", cosine_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
    check("cos 45deg", cosine_distance(&[1.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0 - 0.5f64.sqrt());
    let single = |f: &[f32], frame: u32| Tracklet::new(vec![det(frame, f, unit)]).unwrap();
    check("tracklet identical", tracklet_distance(&single(&[1.0, 0.0], 1), &single(&[1.0, 0.0], 2)).unwrap(), 0.0);
    check("tracklet orthogonal", tracklet_distance(&single(&[1.0, 0.0], 1), &single(&[0.0, 1.0], 2)).unwrap(), 1.0);
    check("tracklet 45deg", tracklet_distance(&single(&[1.0, 0.0], 1), &single(&[1.0, 1.0], 2)).unwrap(), 1.0 - 0.5f64.sqrt());

    // weighting
    let cfg = FcgConfig::default();
    check("lambda_t 10", temporal_weight(10, &cfg), 1.0);
    check("lambda_t 41", temporal_weight(41, &cfg), 4.0);
    check("lambda_t 40", temporal_weight(40, &cfg), 1.0);
    let ctx = |a: BBox, b: BBox| PairContext { last_box_k: a, first_box_q: b, delta_t: 1 };
    let (lc, lf) = spatial_weights(&ctx(unit, unit), &cfg);
    check("lambda_c identical", lc, 0.15);
    check("lambda_f identical", lf, 1.0);
    let far = bx(150.0, 0.0, 50.0, 100.0);
    check("far displacement", box_displacement(&unit, &far), 3.0);
    let (lc, lf) = spatial_weights(&ctx(unit, far), &cfg);
    check("lambda_c far", lc, 1.0);
    check("lambda_f far", lf, 2.0);
    let (lc, _) = spatial_weights(&ctx(bx(0., 0., 2., 2.), bx(1., 1., 2., 2.)), &cfg);
    check("lambda_c partial", lc, 1.0);
    check("weighted product", combine(0.1, 4.0, 1.0, 2.0), 0.8);
    let a = single(&[1.0, 0.0], 1);
    let b = single(&[1.0, 1.0], 3);
    check("weighted priors off", weighted_distance(&a, &b, &cfg.without_priors()).unwrap(), tracklet_distance(&a, &b).unwrap());
    check("weighted identical adjacent", weighted_distance(&single(&[1.0, 0.0], 1), &single(&[1.0, 0.0], 2), &cfg).unwrap(), 0.0);

    // clustering
    let three = CondensedMatrix::new(3, vec![0.1, 0.9, 0.8]).unwrap();
    let d = linkage(&three, &ConstraintSet::new());
    check("linkage n=3 merges", d.merges().len() as f64, 2.0);
    check("linkage first height", d.merges()[0].height, 0.1);
    check("linkage second height", d.merges()[1].height, 0.85);
    let dc = linkage(&three, &[(0, 1)].into_iter().collect());
    check("constrained merges", dc.merges().len() as f64, 1.0);
    check("constrained height", dc.merges()[0].height, 0.8);
    check("linkage n=1", linkage(&CondensedMatrix::new(1, vec![]).unwrap(), &ConstraintSet::new()).merges().len() as f64, 0.0);
    let exact = |ok: bool| if ok { 0.0 } else { 1.0 };
    check("cut low", exact(d.cut(0.05) == vec![vec![0], vec![1], vec![2]]), 0.0);
    check("cut 0.5", exact(d.cut(0.5) == vec![vec![0, 1], vec![2]]), 0.0);
    check("cut 0.9", exact(d.cut(0.9) == vec![vec![0, 1, 2]]), 0.0);
    let metric = |x: &f64, y: &f64| Ok::<_, ()>((x - y).abs());
    check("cluster empty", cluster(&[] as &[f64], metric, &ConstraintSet::new(), 0.055).unwrap().len() as f64, 0.0);
    check("cluster 0.04", cluster(&[0.0, 0.04], metric, &ConstraintSet::new(), 0.055).unwrap().len() as f64, 1.0);
    check("cluster 0.06", cluster(&[0.0, 0.06], metric, &ConstraintSet::new(), 0.055).unwrap().len() as f64, 2.0);

    // pipeline
    let cfg2 = FcgConfig { feature_dim: 2, ..FcgConfig::default() };
    let lf = pipeline::generate_tracklets(&[det(1, &[1.0, 0.0], unit)], &cfg2).unwrap();
    check("one detection tracklets", lf[0].tracklets.len() as f64, 1.0);
    let far_box = bx(600.0, 0.0, 50.0, 100.0);
    let two_by_two = vec![
        Detection::new(1, unit, 1.0, vec![1.0f32, 0.0], 0).unwrap(),
        Detection::new(1, far_box, 1.0, vec![0.0f32, 1.0], 1).unwrap(),
        Detection::new(2, unit, 1.0, vec![1.0f32, 0.0], 2).unwrap(),
        Detection::new(2, far_box, 1.0, vec![0.0f32, 1.0], 3).unwrap(),
    ];
    let lf = pipeline::generate_tracklets(&two_by_two, &FcgConfig { window: 2, ..cfg2.clone() }).unwrap();
    check("2x2 tracklets", lf[0].tracklets.len() as f64, 2.0);
    check("2x2 pure", exact(lf[0].tracklets.iter().all(|t| t.len() == 2 && t.detections()[0].feature() == t.detections()[1].feature())), 0.0);
    let same_frame = vec![
        Detection::new(1, unit, 1.0, vec![1.0f32, 0.0], 0).unwrap(),
        Detection::new(1, unit, 1.0, vec![1.0f32, 0.0], 1).unwrap(),
    ];
    check("same frame split", pipeline::generate_tracklets(&same_frame, &cfg2).unwrap()[0].tracklets.len() as f64, 2.0);
    let lifted = |span: usize, t: Tracklet| fcg::LiftedFrame { level: 1, span_start: span, span_end: span + 1, tracklets: vec![t] };
    let fused = pipeline::fuse_lifted_frames(&lifted(0, single(&[1.0, 0.0], 6)), &lifted(1, single(&[1.0, 0.0], 7)), &cfg2).unwrap();
    check("fuse same identity", fused.tracklets.len() as f64, 1.0);
    let fused = pipeline::fuse_lifted_frames(&lifted(0, single(&[1.0, 0.0], 6)), &lifted(1, single(&[0.0, 1.0], 7)), &cfg2).unwrap();
    check("fuse orthogonal", fused.tracklets.len() as f64, 2.0);
    let merged = Tracklet::merge([
        single(&[0.0, 1.0], 1),
        Tracklet::new(vec![det(2, &[1.0, 0.0], unit), det(3, &[1.0, 1.0], unit)]).unwrap(),
    ])
    .unwrap();
    check("merged median x", merged.median_feature()[0], 1.0);
    check("merged median y", merged.median_feature()[1], 1.0);
    check("run empty", pipeline::run(&[], &cfg2).unwrap().len() as f64, 0.0);
    let one = SynthConfig { num_identities: 1, num_frames: 30, feature_noise_sigma: 0.0, max_speed: 1.0, seed: 4, ..SynthConfig::default() };
    let (seq, _) = synth::generate(&one).unwrap();
    let tracks = pipeline::run(&seq.detections, &config_for(&one)).unwrap();
    check("run single identity tracks", tracks.len() as f64, 1.0);
    check("run single identity boxes", tracks.get(1).map_or(0, |t| t.len()) as f64, 30.0);
    let two = SynthConfig { num_identities: 2, num_frames: 30, feature_noise_sigma: 0.0, seed: 4, ..SynthConfig::default() };
    let (seq, gt) = synth::generate(&two).unwrap();
    let tracks = pipeline::run(&seq.detections, &config_for(&two)).unwrap();
    check("run two identities tracks", tracks.len() as f64, 2.0);
    check("run two identities switches", id_switches(&gt, &tracks, 0.5) as f64, 0.0);

    // io
    let blob = mot::write_features(2, &[&[1.0, 0.0]]);
    let seq = mot::parse_detections("1,-1,10,20,30,40,0.9,-1,-1,-1\n", &blob, &cfg2).unwrap();
    let d0 = &seq.detections[0];
    check("parse frame", f64::from(d0.frame()), 1.0);
    check("parse x", d0.bbox().x, 10.0);
    check("parse h", d0.bbox().h, 40.0);
    check("parse score", d0.score(), 0.9);
    let seq = mot::parse_detections("1,-1,10,20,30,40,0.5,-1,-1,-1\n", &blob, &cfg2).unwrap();
    check("parse filtered", seq.detections.len() as f64, 0.0);
    let mismatch = mot::parse_detections("1,-1,0,0,1,1,0.9\n2,-1,0,0,1,1,0.9\n3,-1,0,0,1,1,0.9\n", &mot::write_features(2, &[&[1.0, 0.0], &[1.0, 0.0]]), &cfg2);
    check("parse row mismatch", exact(matches!(mismatch, Err(fcg::FcgError::RowCountMismatch { .. }))), 0.0);
    check("write empty", mot::write_tracks(&TrackSet::new()).len() as f64, 0.0);
    let ts = TrackSet::from_points([(1, TrackPoint { frame: 1, bbox: bx(10., 20., 30., 40.), score: 0.9 })]).unwrap();
    check("write line", exact(mot::write_tracks(&ts) == "1,1,10.00,20.00,30.00,40.00,0.9000,-1,-1,-1\n"), 0.0);
    check("roundtrip", exact(mot::parse_results(&mot::write_tracks(&ts)).unwrap() == ts), 0.0);
    let gt2 = mot::parse_ground_truth("1,3,0,0,5,5,1,1,1\n2,3,0,0,5,5,1,1,1\n").unwrap();
    check("gt two rows", gt2.get(3).map_or(0, |t| t.len()) as f64, 2.0);
    check("gt flag 0", mot::parse_ground_truth("1,3,0,0,5,5,0,1,1\n").unwrap().len() as f64, 0.0);
    check("gt duplicate", exact(mot::parse_ground_truth("1,3,0,0,5,5,1,1,1\n1,3,1,0,5,5,1,1,1\n").is_err()), 0.0);
    let frames10: Vec<Detection> = (1..=10).map(|f| det(f, &[1.0, 0.0], unit)).collect();
    let seq10 = SequenceInput::new("s", frames10);
    check("subsample identity", exact(mot::subsample(&seq10, 1).detections == seq10.detections), 0.0);
    let half = mot::subsample(&seq10, 2);
    check("subsample kept", exact(half.detections.iter().map(|d| d.source_row()).eq([1usize, 3, 5, 7, 9])), 0.0);
    check("subsample renumbered", exact(half.detections.iter().map(|d| d.frame()).eq(1..=5)), 0.0);
    let frames30: Vec<Detection> = (1..=30).map(|f| det(f, &[1.0, 0.0], unit)).collect();
    check("subsample 30", mot::subsample(&SequenceInput::new("s", frames30), 30).detections.len() as f64, 1.0);

    // synth
    let (seq, _) = synth::generate(&SynthConfig { num_identities: 2, num_frames: 10, feature_noise_sigma: 0.0, ..SynthConfig::default() }).unwrap();
    check("synth count", seq.detections.len() as f64, 20.0);
    let (seq, _) = synth::generate(&SynthConfig { num_identities: 1, num_frames: 10, occlusions: vec![(0, 4, 6)], ..SynthConfig::default() }).unwrap();
    check("synth occlusion", seq.detections.len() as f64, 7.0);
    let s7 = SynthConfig { seed: 7, ..SynthConfig::default() };
    check("synth deterministic", exact(synth::generate(&s7).unwrap() == synth::generate(&s7).unwrap()), 0.0);

    // metrics
    let track = |id: u32, frames: std::ops::RangeInclusive<u32>| {
        frames.map(move |frame| (id, TrackPoint { frame, bbox: bx(0., 0., 10., 10.), score: 1.0 })).collect::<Vec<_>>()
    };
    let gt = TrackSet::from_points(track(1, 1..=10)).unwrap();
    check("idf1 perfect", idf1(&gt, &gt, 0.5), 1.0);
    check("switches perfect", id_switches(&gt, &gt, 0.5) as f64, 0.0);
    let split = TrackSet::from_points(track(1, 1..=5).into_iter().chain(track(2, 6..=10))).unwrap();
    let c = identity_counts(&gt, &split, 0.5);
    check("split idtp", c.idtp as f64, 5.0);
    check("split idfp", c.idfp as f64, 5.0);
    check("split idfn", c.idfn as f64, 5.0);
    check("split idf1", c.idf1(), 0.5);
    check("split switches", id_switches(&gt, &split, 0.5) as f64, 1.0);
    check("idf1 empty pred", idf1(&gt, &TrackSet::new(), 0.5), 0.0);
    let alternating = TrackSet::from_points((1..=4).map(|f| (2 - f % 2, TrackPoint { frame: f, bbox: bx(0., 0., 10., 10.), score: 1.0 }))).unwrap();
    check("alternating switches", id_switches(&TrackSet::from_points(track(1, 1..=4)).unwrap(), &alternating, 0.5) as f64, 3.0);

    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(1);
    report(2, "formula unit suite", pass, format!("{} failures in {elapsed:.2?} {failures:?}", failures.len()));
    assert!(pass);
}

fn criterion_3_perfect_recovery() {
    let start = Instant::now();
    let scene = criterion3_scene();
    let (seq, gt) = synth::generate(&scene).unwrap();
    let tracks = pipeline::run(&seq.detections, &config_for(&scene)).unwrap();
    let score = idf1(&gt, &tracks, 0.5);
    let switches = id_switches(&gt, &tracks, 0.5);
    let elapsed = start.elapsed();
    let pass = score == 1.0 && switches == 0 && elapsed < Duration::from_secs(30);
    report(3, "perfect recovery", pass, format!("IDF1 {score}, {switches} switches, {} tracks, {elapsed:.2?}", tracks.len()));
    assert!(pass);
}

fn criterion_4_reidentification_after_long_occlusion() {
    let scene = SynthConfig {
        num_identities: 3,
        num_frames: 200,
        feature_noise_sigma: 0.02,
        occlusions: vec![(0, 61, 120)],
        seed: 11,
        ..SynthConfig::default()
    };
    let (seq, gt) = synth::generate(&scene).unwrap();
    let cfg = config_for(&scene);
    assert!(cfg.use_temporal);
    let tracks = pipeline::run(&seq.detections, &cfg).unwrap();
    let score = idf1(&gt, &tracks, 0.5);
    let occluded_gt = gt.get(1).unwrap();
    let single_track = tracks
        .tracks()
        .values()
        .any(|t| t.len() == occluded_gt.len() && t.iter().zip(occluded_gt).all(|(a, b)| a.frame == b.frame && a.bbox == b.bbox));
    let pass = score == 1.0 && single_track;
    report(4, "occlusion re-identification", pass, format!("IDF1 {score}, occluded identity in one track: {single_track}"));
    assert!(pass);
}

fn criterion_5_same_frame_exclusivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut violations = 0;
    let mut lost = 0;
    for seed in 0..100u64 {
        let ids = rng.random_range(1..=8usize);
        let frames = rng.random_range(10..=120u32);
        let mut occlusions = Vec::new();
        for k in 0..ids {
            if rng.random_bool(0.3) {
                let s = rng.random_range(1..=frames);
                let e = rng.random_range(s..=frames);
                occlusions.push((k, s, e));
            }
        }
        let scene = SynthConfig {
            num_identities: ids,
            num_frames: frames,
            feature_noise_sigma: rng.random_range(0.0..0.3),
            motion_model: if rng.random_bool(0.5) { MotionModel::Linear } else { MotionModel::Sinusoidal },
            occlusions,
            max_speed: rng.random_range(0.0..15.0),
            seed,
            ..SynthConfig::default()
        };
        let (seq, _) = synth::generate(&scene).unwrap();
        let out = pipeline::run_detailed(&seq.detections, &config_for(&scene)).unwrap();
        let Some(final_frame) = out.final_frame else { continue };
        for t in &final_frame.tracklets {
            let frames: HashSet<u32> = t.frames().collect();
            violations += t.len() - frames.len();
        }
        if final_frame.num_detections() != seq.detections.len() || out.tracks.num_boxes() != seq.detections.len() {
            lost += 1;
        }
    }
    let pass = violations == 0 && lost == 0;
    report(5, "same-frame exclusivity", pass, format!("{violations} violations, {lost} runs dropped detections"));
    assert!(pass);
}

fn low_fps_results(threads: Option<usize>) -> Vec<(u32, f64, String)> {
    let scene = criterion6_scene();
    let (seq, gt) = synth::generate(&scene).unwrap();
    let cfg = config_for(&scene);
    LOW_FPS_RATIOS
        .iter()
        .map(|&ratio| {
            let sub = mot::subsample(&seq, ratio);
            let sub_gt = mot::subsample_tracks(&gt, ratio);
            let tracks = with_threads(threads, || pipeline::run(&sub.detections, &cfg).unwrap());
            (ratio, idf1(&sub_gt, &tracks, 0.5), mot::write_tracks(&tracks))
        })
        .collect()
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f),
    }
}

fn criterion_6_low_fps_robustness() {
    let start = Instant::now();
    let results = low_fps_results(None);
    let elapsed = start.elapsed();
    let scores: Vec<String> = results.iter().map(|(r, s, _)| format!("1/{r}: {s:.4}")).collect();
    let pass = results.iter().all(|(_, s, _)| *s >= 0.95) && elapsed < Duration::from_secs(30);
    report(6, "low-fps robustness", pass, format!("IDF1 {} in {elapsed:.2?}", scores.join(", ")));
    assert!(pass);
}

/// Two identities far apart on screen with similar appearance: their
/// prototypes sit just beyond the clustering threshold and the per-detection
/// noise regularly pulls cross-identity distances below it. Both vanish for
/// a few frames midway.
fn look_alike_scene(seed: u64) -> (Vec<Detection>, TrackSet, FcgConfig) {
    const DIM: usize = 16;
    const FRAMES: u32 = 120;
    const GAP: std::ops::RangeInclusive<u32> = 55..=62;
    const ANGLES: [f64; 2] = [0.0, 0.36];
    const SIGMA: f64 = 0.07;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, SIGMA).unwrap();
    let starts: Vec<(f64, f64)> = [200.0, 1400.0]
        .iter()
        .map(|&x| (x + rng.random_range(-100.0..100.0), rng.random_range(100.0..800.0)))
        .collect();
    let velocities: Vec<(f64, f64)> = (0..2).map(|_| (rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8))).collect();
    let mut dets = Vec::new();
    let mut truth = Vec::new();
    for frame in 1..=FRAMES {
        if GAP.contains(&frame) {
            continue;
        }
        for k in 0..2 {
            let t = f64::from(frame);
            let bbox = BBox::new(starts[k].0 + velocities[k].0 * t, starts[k].1 + velocities[k].1 * t, 50.0, 100.0).unwrap();
            let angle = ANGLES[k];
            let mut v = vec![0.0; DIM];
            v[0] = angle.cos();
            v[1] = angle.sin();
            v.iter_mut().for_each(|x| *x += noise.sample(&mut rng));
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let feature: Vec<f32> = v.iter().map(|x| (x / norm) as f32).collect();
            let row = dets.len();
            dets.push(Detection::new(frame, bbox, 1.0, feature, row).unwrap());
            truth.push((k as u32 + 1, TrackPoint { frame, bbox, score: 1.0 }));
        }
    }
    let cfg = FcgConfig { feature_dim: DIM, ..FcgConfig::default() };
    (dets, TrackSet::from_points(truth).unwrap(), cfg)
}

fn criterion_7_spatial_coherence_reduces_switches() {
    let mut worse = 0;
    let mut better = 0;
    let mut rows = Vec::new();
    for seed in 0..20u64 {
        let (dets, gt, cfg) = look_alike_scene(seed);
        let on = pipeline::run(&dets, &cfg).unwrap();
        let off = pipeline::run(&dets, &FcgConfig { use_spatial: false, ..cfg.clone() }).unwrap();
        let (s_on, s_off) = (id_switches(&gt, &on, 0.5), id_switches(&gt, &off, 0.5));
        if s_on > s_off {
            worse += 1;
        }
        if s_on < s_off {
            better += 1;
        }
        rows.push(format!("{s_on}/{s_off}"));
    }
    let pass = worse == 0 && better >= 5;
    report(7, "spatial ablation direction", pass, format!("ON/OFF switches per seed [{}], strictly better on {better}", rows.join(" ")));
    assert!(pass);
}

fn criterion_8_schedule_independence() {
    let scene = criterion3_scene();
    let (seq, _) = synth::generate(&scene).unwrap();
    let cfg = config_for(&scene);
    let recovery: Vec<String> = [1, 2, 8]
        .iter()
        .map(|&n| with_threads(Some(n), || mot::write_tracks(&pipeline::run(&seq.detections, &cfg).unwrap())))
        .collect();
    let low_fps: Vec<Vec<String>> = [1, 2, 8]
        .iter()
        .map(|&n| low_fps_results(Some(n)).into_iter().map(|(_, _, text)| text).collect())
        .collect();
    let pass = recovery.iter().all(|r| r == &recovery[0]) && low_fps.iter().all(|r| r == &low_fps[0]) && !recovery[0].is_empty();
    report(8, "determinism across 1/2/8 workers", pass, format!("{} result bytes compared", recovery[0].len()));
    assert!(pass);
}

fn criterion_9_window_size_plateau() {
    let scene = criterion3_scene();
    let (seq, gt) = synth::generate(&scene).unwrap();
    let mut scores = Vec::new();
    for window in 2..=6 {
        let cfg = FcgConfig { window, ..config_for(&scene) };
        let tracks = pipeline::run(&seq.detections, &cfg).unwrap();
        scores.push((window, idf1(&gt, &tracks, 0.5)));
    }
    let pass = scores.iter().all(|(_, s)| *s == 1.0);
    report(9, "window-size plateau", pass, format!("{scores:?}"));
    assert!(pass);
}


fn main() {
    let criteria: [(u32, fn()); 9] = [
        (1, criterion_1_constrained_upgma_matches_brute_force),
        (2, criterion_2_formula_unit_suite),
        (3, criterion_3_perfect_recovery),
        (4, criterion_4_reidentification_after_long_occlusion),
        (5, criterion_5_same_frame_exclusivity),
        (6, criterion_6_low_fps_robustness),
        (7, criterion_7_spatial_coherence_reduces_switches),
        (8, criterion_8_schedule_independence),
        (9, criterion_9_window_size_plateau),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (id, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        if std::panic::catch_unwind(check).is_err() {
            if LAST_REPORTED.load(Ordering::SeqCst) != id {
                println!("criterion {id}: FAIL (panicked before completing)");
            }
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
