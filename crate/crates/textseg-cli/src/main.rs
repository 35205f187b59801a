//! `textseg`: segment text lines and words in BMP images, generate
//! synthetic benchmark pages, and score predictions against ground truth.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use textseg::eval::{
    eval_csv, evaluate_sets, format_table, generate_page, group_records, EvalReport, ImageBoxes,
    LayoutSpec,
};
use textseg::imaging::{load_bmp, save_binary_bmp, save_bmp, save_gray_bmp};
use textseg::pipeline::{run_pipeline, DomainProfile};
use textseg::records::{read_box_csv, result_records, write_box_csv};
use textseg::render::render_overlay;

#[derive(Parser)]
#[command(name = "textseg", version, about = "Text line and word segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment BMP images into line and word boxes
    Segment(SegmentArgs),
    /// Generate synthetic pages with ground truth
    Generate(GenerateArgs),
    /// Score prediction CSVs against ground truth CSVs
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct SegmentArgs {
    /// Input BMP images
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Built-in profile name (document, bcr, lpr), `@path` to a profile
    /// file, or a name found as `<name>.profile` in $TEXTSEG_PROFILE_DIR
    #[arg(long, default_value = "document")]
    profile: String,

    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Also write per-stage debug images
    #[arg(long)]
    debug: bool,

    /// Estimate and undo page tilt before segmenting
    #[arg(long)]
    deskew: bool,

    /// Keep salt-and-pepper specks (skip the median prefilter)
    #[arg(long)]
    no_despeckle: bool,

    /// Treat text as light on a dark background
    #[arg(long)]
    invert: bool,

    /// Segment words over the whole image, skipping the line stage
    #[arg(long)]
    skip_line_stage: bool,

    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of pages
    #[arg(long, default_value_t = 1)]
    count: u32,

    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Base RNG seed; page i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Text lines per page
    #[arg(long, default_value_t = 10)]
    lines: u32,

    /// Words per line
    #[arg(long, default_value_t = 8)]
    words: u32,

    /// Salt-and-pepper probability per pixel
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    /// Page tilt in degrees (clockwise)
    #[arg(long, default_value_t = 0.0)]
    skew: f64,

    #[arg(long, default_value_t = 7)]
    char_width: u32,

    #[arg(long, default_value_t = 6)]
    char_height: u32,

    /// Background columns between characters of a word
    #[arg(long, default_value_t = 4)]
    intra_word_gap: u32,

    /// Background columns between words
    #[arg(long, default_value_t = 51)]
    inter_word_gap: u32,

    /// Background rows between lines
    #[arg(long, default_value_t = 24)]
    inter_line_gap: u32,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Prediction CSV files
    #[arg(required = true)]
    predictions: Vec<PathBuf>,

    /// Ground truth: a CSV file, or a directory scanned for *.truth.csv
    #[arg(long)]
    truth: PathBuf,

    /// IoU threshold for box matching
    #[arg(long, default_value_t = 0.5)]
    iou: f64,

    /// Also write the score records as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Segment(args) => cmd_segment(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("textseg: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Resolves a --profile argument: `@path`, a built-in name, or a name
/// looked up as `<name>.profile` under $TEXTSEG_PROFILE_DIR.
fn resolve_profile(spec: &str) -> anyhow::Result<DomainProfile> {
    if let Some(path) = spec.strip_prefix('@') {
        return DomainProfile::from_file(path).with_context(|| format!("profile {path}"));
    }
    if let Some(profile) = DomainProfile::by_name(spec) {
        return Ok(profile);
    }
    if let Ok(dir) = std::env::var("TEXTSEG_PROFILE_DIR") {
        let path = Path::new(&dir).join(format!("{spec}.profile"));
        if path.exists() {
            return DomainProfile::from_file(&path)
                .with_context(|| format!("profile {}", path.display()));
        }
    }
    bail!("unknown profile {spec:?}: not built in (document, bcr, lpr), and no {spec}.profile in $TEXTSEG_PROFILE_DIR");
}

fn file_stem(path: &Path) -> anyhow::Result<String> {
    Ok(path
        .file_stem()
        .with_context(|| format!("{} has no file name", path.display()))?
        .to_string_lossy()
        .into_owned())
}

fn cmd_segment(args: SegmentArgs) -> anyhow::Result<ExitCode> {
    let mut profile = resolve_profile(&args.profile)?;
    if args.deskew {
        profile.deskew_enabled = true;
    }
    if args.no_despeckle {
        profile.despeckle = false;
    }
    if args.invert {
        profile.invert_polarity = true;
    }
    if args.skip_line_stage {
        profile.skip_line_stage = true;
    }
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;

    let next = AtomicUsize::new(0);
    let failures = Mutex::new(Vec::<String>::new());
    let jobs = args.jobs.clamp(1, args.inputs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(input) = args.inputs.get(i) else {
                    break;
                };
                if let Err(e) = segment_one(input, &profile, &args) {
                    let message = format!("{}: {e:#}", input.display());
                    eprintln!("textseg: {message}");
                    failures
                        .lock()
                        .expect("no panics hold this lock")
                        .push(message);
                }
            });
        }
    });

    let failures = failures.into_inner().expect("scope joined all workers");
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "textseg: {} of {} images failed",
            failures.len(),
            args.inputs.len()
        );
        Ok(ExitCode::FAILURE)
    }
}

fn segment_one(input: &Path, profile: &DomainProfile, args: &SegmentArgs) -> anyhow::Result<()> {
    let stem = file_stem(input)?;
    let image = load_bmp(input)?;
    let result = run_pipeline(&image, profile, &stem, true)?;

    let out = |suffix: &str| args.out.join(format!("{stem}.{suffix}"));
    write_box_csv(out("boxes.csv"), &result_records(&result))?;

    let artifacts = result
        .artifacts
        .as_ref()
        .expect("pipeline ran with artifacts");
    let mut boxes = result.lines.clone();
    boxes.extend(result.words.iter().cloned());
    save_bmp(
        &render_overlay(&artifacts.binary, &boxes),
        out("overlay.bmp"),
    )?;

    if args.debug {
        save_gray_bmp(&artifacts.gray, out("gray.bmp"))?;
        save_binary_bmp(&artifacts.binary, out("binary.bmp"))?;
        save_binary_bmp(&artifacts.edges, out("edges.bmp"))?;
        if let Some(acc) = &artifacts.line_accumulator {
            save_gray_bmp(acc, out("accumulator.bmp"))?;
        }
        if let Some(hough) = &artifacts.line_hough {
            save_binary_bmp(hough, out("hough-lines.bmp"))?;
        }
        save_binary_bmp(&artifacts.word_hough, out("hough-words.bmp"))?;
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<ExitCode> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;
    for i in 0..args.count {
        let id = format!("page-{i:03}");
        let spec = LayoutSpec {
            n_lines: args.lines,
            words_per_line: args.words,
            char_width: args.char_width,
            char_height: args.char_height,
            intra_word_gap: args.intra_word_gap,
            inter_word_gap: args.inter_word_gap,
            inter_line_gap: args.inter_line_gap,
            noise_prob: args.noise,
            skew_deg: args.skew,
            seed: args.seed.wrapping_add(i as u64),
        };
        let page = generate_page(&spec, &id).with_context(|| format!("generating {id}"))?;
        save_bmp(&page.image, args.out.join(format!("{id}.bmp")))?;
        write_box_csv(
            args.out.join(format!("{id}.truth.csv")),
            &page.truth.to_records(),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<ExitCode> {
    if !(args.iou > 0.0 && args.iou <= 1.0) {
        bail!("--iou must be in (0, 1], got {}", args.iou);
    }

    let mut pred_records = Vec::new();
    for path in &args.predictions {
        pred_records.extend(read_box_csv(path).with_context(|| path.display().to_string())?);
    }

    let mut truth_paths = Vec::new();
    if args.truth.is_dir() {
        for entry in
            std::fs::read_dir(&args.truth).with_context(|| args.truth.display().to_string())?
        {
            let path = entry
                .with_context(|| args.truth.display().to_string())?
                .path();
            if path
                .file_name()
                .is_some_and(|n| n.to_string_lossy().ends_with(".truth.csv"))
            {
                truth_paths.push(path);
            }
        }
        truth_paths.sort();
        if truth_paths.is_empty() {
            bail!("no *.truth.csv files in {}", args.truth.display());
        }
    } else {
        truth_paths.push(args.truth.clone());
    }
    let mut truth_records = Vec::new();
    for path in &truth_paths {
        truth_records.extend(read_box_csv(path).with_context(|| path.display().to_string())?);
    }

    let preds = group_records(&pred_records);
    let mut truths = group_records(&truth_records);
    let mut reports: Vec<EvalReport> = Vec::new();
    for pred in &preds {
        let Some(pos) = truths.iter().position(|t| t.image_id == pred.image_id) else {
            bail!("no ground truth for image {:?}", pred.image_id);
        };
        let truth = truths.remove(pos);
        reports.push(evaluate_sets(pred, &truth, args.iou)?);
    }
    // Truth images never predicted at all score as fully missed.
    for truth in &truths {
        let empty = ImageBoxes {
            image_id: truth.image_id.clone(),
            lines: Vec::new(),
            words: Vec::new(),
        };
        reports.push(evaluate_sets(&empty, truth, args.iou)?);
    }

    print!("{}", format_table(&reports));
    if let Some(path) = &args.csv {
        std::fs::write(path, eval_csv(&reports))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}
