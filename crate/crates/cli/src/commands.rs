use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use braille_core::app::corpus::{random_text, scan_noise, synthetic_pages};
use braille_core::app::{run_ablation, run_pipeline, AblationPage, Order, PipelineConfig};
use braille_core::decode::{Decoder, Language};
use braille_core::extract::bit_string_dump;
use braille_core::image::{load_any, save_pgm};
use braille_core::synth::{add_noise, render_page, NoiseKind, NoiseSpec, RenderStyle};
use clap::{Args, Parser, Subcommand};

use crate::server::{router, ServiceState};

#[derive(Debug, Parser)]
#[command(name = "braille", version, about = "Braille page recognition, synthesis and keypad entry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Read a scanned Braille page (PGM or PNG) and write its text.
    Convert(ConvertArgs),
    /// Render text as a Braille page image with ground truth sidecars.
    Synth(SynthArgs),
    /// Compare enhancement orders on noisy synthetic or supplied pages.
    Ablate(AblateArgs),
    /// Serve keypad sessions over HTTP on localhost.
    KeypadServe(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// en, hi or ta.
    #[arg(long)]
    pub lang: Option<Language>,
    #[arg(long)]
    pub grade: Option<u8>,
    /// Pipeline config file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl TableArgs {
    fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(lang) = self.lang {
            if lang != cfg.language && self.grade.is_none() {
                cfg.grade = None;
            }
            cfg.language = lang;
        }
        if self.grade.is_some() {
            cfg.grade = self.grade;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub image: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
    /// Enhancement order, e.g. CS,IS,MO or none.
    #[arg(long)]
    pub order: Option<Order>,
    /// Write band and cell boxes to FILE, or to stderr without one.
    #[arg(long, value_name = "FILE", num_args = 0..=1, require_equals = true)]
    pub dump_layout: Option<Option<PathBuf>>,
    /// Write one bit string per cell to FILE, or to stderr without one.
    #[arg(long, value_name = "FILE", num_args = 0..=1, require_equals = true)]
    pub dump_bits: Option<Option<PathBuf>>,
    /// Output text file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Command that speaks the text. `{file}` is replaced by a file holding
    /// the text and `{lang}` by the language code; without `{file}` the
    /// text arrives on stdin.
    #[arg(long)]
    pub speak_cmd: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// UTF-8 text file, or - for stdin. Omit with --random.
    pub text: Option<PathBuf>,
    /// Render this many random words instead of a text file.
    #[arg(long, conflicts_with = "text")]
    pub random: Option<usize>,
    #[arg(long, default_value = "en")]
    pub lang: Language,
    #[arg(long)]
    pub grade: Option<u8>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noise applied after rendering, in order: gaussian:SIGMA, salt:DENSITY
    /// or speck:DENSITY[:RADIUS[:VALUE]].
    #[arg(long)]
    pub noise: Vec<NoiseKind>,
    #[arg(long, default_value_t = 40)]
    pub cells_per_line: usize,
    /// Output image; `.txt` and `.bits` sidecars are written next to it.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Orders to compare, separated by semicolons.
    #[arg(long, default_value = "CS;CS,IS;CS,IS,MO;MO,CS,IS")]
    pub orders: String,
    /// Synthetic pages to render when no --dir is given.
    #[arg(long, default_value_t = 10)]
    pub pages: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Noise for synthetic pages; defaults to gaussian:8 and speck:0.0005:4:0.
    #[arg(long)]
    pub noise: Vec<NoiseKind>,
    /// Directory of page images, each with a `.txt` reference beside it.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Also write the table as tab-separated rows.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8765)]
    pub port: u16,
    /// Language for sessions that do not name one.
    #[arg(long, default_value = "en")]
    pub lang: Language,
    #[arg(long)]
    pub grade: Option<u8>,
    /// Directory of static files, e.g. a browser keypad.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Convert(a) => convert(a),
        Cmd::Synth(a) => synth(a),
        Cmd::Ablate(a) => ablate(a),
        Cmd::KeypadServe(a) => serve(a),
    }
}

fn write_or_stderr(target: &Option<PathBuf>, text: &str) -> Result<()> {
    match target {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

fn convert(a: ConvertArgs) -> Result<()> {
    let mut cfg = a.table.pipeline_config()?;
    if let Some(order) = a.order {
        cfg.order = order;
    }
    let report = run_pipeline(&a.image, &cfg)?;

    if let Some(target) = &a.dump_layout {
        write_or_stderr(target, &report.layout.dump())?;
    }
    if let Some(target) = &a.dump_bits {
        write_or_stderr(target, &bit_string_dump(&report.rows))?;
    }
    let mut text = report.text.clone();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &a.output {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    eprintln!(
        "{} lines, {} cells ({} blank, {} unmapped), {} words in {:.2?}",
        report.rows.len(),
        report.stats.cells,
        report.stats.blank,
        report.stats.unmapped,
        report.stats.words,
        report.timing.total()
    );
    if let Some(template) = &a.speak_cmd {
        speak(template, &text, cfg.language, a.output.as_deref())?;
    }
    Ok(())
}

/// Runs the speech command through the shell.
fn speak(template: &str, text: &str, lang: Language, written: Option<&Path>) -> Result<()> {
    let mut tmp = None;
    let cmd = template.replace("{lang}", lang.code());
    let cmd = if cmd.contains("{file}") {
        let path = match written {
            Some(p) => p.to_path_buf(),
            None => {
                let p = std::env::temp_dir().join(format!("braille-speak-{}.txt", std::process::id()));
                fs::write(&p, text)?;
                tmp = Some(p.clone());
                p
            }
        };
        cmd.replace("{file}", &path.display().to_string())
    } else {
        cmd
    };
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::piped())
        .spawn()
        .with_context(|| format!("starting {cmd:?}"))?;
    if let Some(mut stdin) = child.stdin.take() {
        // A command that reads a file may close stdin straight away.
        let _ = stdin.write_all(text.as_bytes());
    }
    let status = child.wait()?;
    if let Some(p) = tmp {
        let _ = fs::remove_file(p);
    }
    if !status.success() {
        bail!("speech command {cmd:?} failed with {status}");
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let grade = a.grade.unwrap_or_else(|| braille_core::decode::MappingTable::default_grade(a.lang));
    let decoder = Decoder::shipped(a.lang, grade)?;
    let text = match (&a.text, a.random) {
        (_, Some(n)) => random_text(&decoder, n, n, a.seed),
        (Some(p), None) if p.as_os_str() == "-" => std::io::read_to_string(std::io::stdin())?,
        (Some(p), None) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        (None, None) => bail!("give a text file or --random N"),
    };
    let cfg = PipelineConfig { language: a.lang, grade: Some(grade), ..Default::default() };
    let style = RenderStyle { seed: a.seed, cells_per_line: a.cells_per_line, ..Default::default() };
    let mut page = render_page(&text, &decoder, &cfg.geometry(), &style)?;
    for (i, kind) in a.noise.iter().enumerate() {
        let spec = NoiseSpec { kind: *kind, seed: a.seed.wrapping_add(1000 * (i as u64 + 1)) };
        page.image = add_noise(&page.image, &spec);
    }

    let bytes = match a.output.extension().and_then(|e| e.to_str()) {
        Some("png") => bail!("synth writes PGM; use a .pgm output"),
        _ => save_pgm(&page.image),
    };
    fs::write(&a.output, bytes).with_context(|| format!("writing {}", a.output.display()))?;
    let mut truth = page.text.clone();
    truth.push('\n');
    fs::write(a.output.with_extension("txt"), truth)?;
    fs::write(a.output.with_extension("bits"), bit_string_dump(&page.rows))?;
    eprintln!(
        "{}x{} px, {} lines, {} cells",
        page.image.width(),
        page.image.height(),
        page.rows.len(),
        page.rows.iter().map(Vec::len).sum::<usize>()
    );
    Ok(())
}

fn pages_from_dir(dir: &Path) -> Result<Vec<AblationPage>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("pgm" | "png")))
        .collect();
    paths.sort();
    let mut pages = Vec::new();
    for p in paths {
        let reference = p.with_extension("txt");
        if !reference.exists() {
            eprintln!("skipping {}: no {}", p.display(), reference.display());
            continue;
        }
        pages.push(AblationPage {
            name: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            image: load_any(&fs::read(&p)?).with_context(|| format!("loading {}", p.display()))?,
            reference: fs::read_to_string(&reference)?,
        });
    }
    if pages.is_empty() {
        bail!("no page images with references in {}", dir.display());
    }
    Ok(pages)
}

fn ablate(a: AblateArgs) -> Result<()> {
    let cfg = a.table.pipeline_config()?;
    let orders: Vec<Order> = a.orders.split(';').map(str::parse).collect::<Result<_, _>>()?;
    let pages = match &a.dir {
        Some(dir) => pages_from_dir(dir)?,
        None => {
            let decoder = Decoder::shipped(cfg.language, cfg.grade())?;
            let noise: Vec<NoiseSpec> = if a.noise.is_empty() {
                scan_noise(a.seed.wrapping_mul(7919))
            } else {
                a.noise
                    .iter()
                    .enumerate()
                    .map(|(i, &kind)| NoiseSpec { kind, seed: a.seed.wrapping_mul(7919).wrapping_add(i as u64) })
                    .collect()
            };
            let style = RenderStyle::default();
            synthetic_pages(&decoder, a.pages, a.seed, &cfg.geometry(), &style, &noise)?
                .into_iter()
                .map(|p| AblationPage { name: p.name, image: p.page.image, reference: p.page.text })
                .collect()
        }
    };
    let table = run_ablation(&pages, &orders, &cfg)?;
    print!("{}", table.to_text());
    for (p, o, msg) in &table.failures {
        eprintln!("{} with {}: {msg}", table.pages[*p], table.orders[*o]);
    }
    if let Some(path) = &a.tsv {
        fs::write(path, table.to_tsv())?;
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Result<()> {
    let state = Arc::new(ServiceState::new(a.lang, a.grade));
    // Fail on a bad default table before binding the port.
    Decoder::shipped(a.lang, a.grade.unwrap_or_else(|| braille_core::decode::MappingTable::default_grade(a.lang)))?;
    let app = router(state, a.static_dir);
    let addr = SocketAddr::from(([127, 0, 0, 1], a.port));
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("keypad service on http://{}", listener.local_addr()?);
        axum::serve(listener, app).await?;
        Ok(())
    })
}
