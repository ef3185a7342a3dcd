use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fcg::metrics::{id_switches, idf1, DEFAULT_IOU_THRESHOLD};
use fcg::mot::{self, SequenceInput};
use fcg::pipeline;
use fcg::synth::{self, MotionModel, SynthConfig};
use fcg::{FcgConfig, FcgError};

#[derive(Parser, Debug)]
#[command(name = "fcg", version, about = "Appearance-driven multi-object tracking by hierarchical tracklet clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Track a sequence from det.txt plus a feature sidecar.
    Track(TrackCmd),
    /// Generate a synthetic sequence with ground truth.
    Synth(SynthCmd),
    /// Score a result file against ground truth.
    Eval(EvalCmd),
    /// Keep every r-th frame of a sequence and renumber frames.
    Subsample(SubsampleCmd),
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    #[arg(long, default_value_t = 6)]
    window: usize,
    #[arg(long, default_value_t = 0.055)]
    tracklet_threshold: f64,
    #[arg(long, default_value_t = 0.055)]
    track_threshold: f64,
    #[arg(long, default_value_t = 40)]
    kt: u32,
    #[arg(long, default_value_t = 4.0)]
    ct: f64,
    #[arg(long, default_value_t = 0.15)]
    off: f64,
    #[arg(long, default_value_t = 2.0)]
    kf: f64,
    #[arg(long, default_value_t = 2.0)]
    cf: f64,
    #[arg(long, default_value_t = 0.7)]
    score_threshold: f64,
    #[arg(long, default_value_t = 2048)]
    feature_dim: usize,
    /// Max frames of constant-velocity extrapolation (defaults to --window).
    #[arg(long)]
    motion_horizon: Option<u32>,
    #[arg(long)]
    no_temporal: bool,
    #[arg(long)]
    no_spatial: bool,
    /// Extrapolate boxes with constant velocity across gaps.
    #[arg(long)]
    motion: bool,
    /// Cluster all tracklets at once instead of fusing adjacent lifted frames.
    #[arg(long)]
    non_consecutive: bool,
}

impl ConfigArgs {
    fn to_config(&self) -> FcgConfig {
        FcgConfig {
            window: self.window,
            tracklet_threshold: self.tracklet_threshold,
            track_threshold: self.track_threshold,
            k_t: self.kt,
            c_t: self.ct,
            off: self.off,
            k_f: self.kf,
            c_f: self.cf,
            score_threshold: self.score_threshold,
            use_temporal: !self.no_temporal,
            use_spatial: !self.no_spatial,
            use_motion: self.motion,
            consecutive: !self.non_consecutive,
            feature_dim: self.feature_dim,
            motion_horizon: self.motion_horizon,
        }
    }
}

#[derive(Args, Debug)]
struct TrackCmd {
    #[arg(long)]
    det: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads, 0 picks automatically.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write every clustering dendrogram to this file.
    #[arg(long)]
    dump_dendrograms: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MotionArg {
    Linear,
    Sinusoidal,
}

#[derive(Args, Debug)]
struct SynthCmd {
    #[arg(long)]
    identities: usize,
    #[arg(long)]
    frames: u32,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    feature_dim: usize,
    #[arg(long, value_enum, default_value = "linear")]
    motion_model: MotionArg,
    /// Occlusion as IDENTITY:START:END (0-based identity, inclusive frames).
    #[arg(long = "occlude", value_parser = parse_occlusion)]
    occlusions: Vec<(usize, u32, u32)>,
    /// Exit as IDENTITY:FRAME.
    #[arg(long = "exit", value_parser = parse_exit)]
    exits: Vec<(usize, u32)>,
    /// Arena size as WIDTHxHEIGHT.
    #[arg(long, value_parser = parse_arena, default_value = "1920x1080")]
    arena: (f64, f64),
    #[arg(long, default_value_t = 3.0)]
    max_speed: f64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct EvalCmd {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
    iou: f64,
}

#[derive(Args, Debug)]
struct SubsampleCmd {
    #[arg(long)]
    det: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    ratio: u32,
    #[arg(long)]
    out_det: PathBuf,
    #[arg(long)]
    out_features: PathBuf,
    /// Optional ground truth to subsample alongside.
    #[arg(long, requires = "out_gt")]
    gt: Option<PathBuf>,
    #[arg(long, requires = "gt")]
    out_gt: Option<PathBuf>,
    #[arg(long, default_value_t = 0.7)]
    score_threshold: f64,
    #[arg(long, default_value_t = 2048)]
    feature_dim: usize,
}

fn parse_occlusion(s: &str) -> Result<(usize, u32, u32), String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [id, start, end] => Ok((
            id.parse().map_err(|e| format!("{e}"))?,
            start.parse().map_err(|e| format!("{e}"))?,
            end.parse().map_err(|e| format!("{e}"))?,
        )),
        _ => Err("expected IDENTITY:START:END".into()),
    }
}

fn parse_exit(s: &str) -> Result<(usize, u32), String> {
    let (id, frame) = s.split_once(':').ok_or("expected IDENTITY:FRAME")?;
    Ok((id.parse().map_err(|e| format!("{e}"))?, frame.parse().map_err(|e| format!("{e}"))?))
}

fn parse_arena(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s.split_once('x').ok_or("expected WIDTHxHEIGHT")?;
    Ok((w.parse().map_err(|e| format!("{e}"))?, h.parse().map_err(|e| format!("{e}"))?))
}

enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn at(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }
}

impl From<FcgError> for CliError {
    fn from(e: FcgError) -> Self {
        match e {
            FcgError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::at(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::at(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::at(path, e))
}

fn load_sequence(det: &Path, features: &Path, cfg: &FcgConfig) -> Result<SequenceInput, CliError> {
    let text = read_text(det)?;
    let blob = read_bytes(features)?;
    let mut seq = mot::parse_detections(&text, &blob, cfg).map_err(|e| match e {
        FcgError::BadFeatureFile(_) | FcgError::RowCountMismatch { .. } => CliError::at(features, e),
        other => CliError::at(det, other),
    })?;
    seq.name = det
        .parent()
        .and_then(Path::file_name)
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(seq)
}

fn track(cmd: &TrackCmd) -> Result<(), CliError> {
    let cfg = cmd.config.to_config();
    cfg.validate()?;
    let seq = load_sequence(&cmd.det, &cmd.features, &cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cmd.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let out = pool.install(|| {
        if cmd.dump_dendrograms.is_some() {
            pipeline::run_with_dendrograms(&seq.detections, &cfg)
        } else {
            pipeline::run_detailed(&seq.detections, &cfg)
        }
    })?;
    write_file(&cmd.out, mot::write_tracks(&out.tracks))?;
    if let Some(path) = &cmd.dump_dendrograms {
        let mut text = String::new();
        for (label, dump) in &out.dendrograms {
            text.push_str(&format!("# {label}\n{dump}"));
        }
        write_file(path, text)?;
    }
    Ok(())
}

fn synth(cmd: &SynthCmd) -> Result<(), CliError> {
    let cfg = SynthConfig {
        num_identities: cmd.identities,
        num_frames: cmd.frames,
        feature_dim: cmd.feature_dim,
        feature_noise_sigma: cmd.sigma,
        motion_model: match cmd.motion_model {
            MotionArg::Linear => MotionModel::Linear,
            MotionArg::Sinusoidal => MotionModel::Sinusoidal,
        },
        occlusions: cmd.occlusions.clone(),
        exits: cmd.exits.clone(),
        arena: cmd.arena,
        max_speed: cmd.max_speed,
        seed: cmd.seed,
        ..SynthConfig::default()
    };
    let (seq, gt) = synth::generate(&cfg)?;
    fs::create_dir_all(&cmd.out_dir).map_err(|e| CliError::at(&cmd.out_dir, e))?;
    let (det_text, blob) = mot::write_detections(&seq, cfg.feature_dim);
    write_file(&cmd.out_dir.join("det.txt"), det_text)?;
    write_file(&cmd.out_dir.join("feats.fcgf"), blob)?;
    write_file(&cmd.out_dir.join("gt.txt"), mot::write_ground_truth(&gt))?;
    Ok(())
}

fn eval(cmd: &EvalCmd) -> Result<(), CliError> {
    if !(cmd.iou > 0.0 && cmd.iou <= 1.0) {
        return Err(CliError::Usage("--iou must lie in (0, 1]".into()));
    }
    let gt = mot::parse_ground_truth(&read_text(&cmd.gt)?).map_err(|e| CliError::at(&cmd.gt, e))?;
    let pred = mot::parse_results(&read_text(&cmd.pred)?).map_err(|e| CliError::at(&cmd.pred, e))?;
    println!("idf1,{:.6}", idf1(&gt, &pred, cmd.iou));
    println!("id_switches,{}", id_switches(&gt, &pred, cmd.iou));
    Ok(())
}

fn subsample(cmd: &SubsampleCmd) -> Result<(), CliError> {
    let cfg = FcgConfig {
        score_threshold: cmd.score_threshold,
        feature_dim: cmd.feature_dim,
        ..FcgConfig::default()
    };
    cfg.validate()?;
    let seq = load_sequence(&cmd.det, &cmd.features, &cfg)?;
    let out = mot::subsample(&seq, cmd.ratio);
    let (det_text, blob) = mot::write_detections(&out, cfg.feature_dim);
    write_file(&cmd.out_det, det_text)?;
    write_file(&cmd.out_features, blob)?;
    if let (Some(gt_path), Some(out_gt)) = (&cmd.gt, &cmd.out_gt) {
        let gt = mot::parse_ground_truth(&read_text(gt_path)?).map_err(|e| CliError::at(gt_path, e))?;
        write_file(out_gt, mot::write_ground_truth(&mot::subsample_tracks(&gt, cmd.ratio)))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Track(cmd) => track(cmd),
        Command::Synth(cmd) => synth(cmd),
        Command::Eval(cmd) => eval(cmd),
        Command::Subsample(cmd) => subsample(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
