//! Monte Carlo simulator of the two-tier downlink.
//!
//! Each trial samples the macro, small cell and user processes in a disk
//! around the origin, associates every user (plus the typical user at the
//! origin) by maximum average received power, silences BSs without users and
//! draws Rayleigh-faded SINR at the origin.
//!
//! Every point process is generated in order of increasing distance from the
//! origin from its own counter-based substream, so a larger window extends a
//! realization instead of replacing it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, UnitCircle};

use crate::error::{Error, Result};
use crate::model::{db_to_linear, CcdfCurve, Method, NetworkConfig, Region, Scenario, Tier};
use crate::nonuniform::PdfRegion;

const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl std::str::FromStr for Execution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parallel" => Ok(Execution::Parallel),
            "sequential" | "serial" => Ok(Execution::Sequential),
            _ => Err(Error::config(format!("unknown execution mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub window_radius_m: f64,
    pub trials: usize,
    pub seed: u64,
    /// Number of work units the trial range is split into. Results do not
    /// depend on it.
    pub parallel_streams: usize,
    pub execution: Execution,
}

impl SimSettings {
    /// Default window: the larger of ≈500 expected macro BSs and five times
    /// max(D, 1/√(πλ₁)).
    pub fn default_window(cfg: &NetworkConfig) -> f64 {
        let spacing = 1.0 / (PI * cfg.lambda_macro).sqrt();
        (500.0 / (PI * cfg.lambda_macro))
            .sqrt()
            .max(5.0 * cfg.inner_radius_m.max(spacing))
    }

    pub fn for_config(cfg: &NetworkConfig, trials: usize, seed: u64) -> Self {
        SimSettings {
            window_radius_m: Self::default_window(cfg),
            trials,
            seed,
            parallel_streams: 64,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials must be positive"));
        }
        if self.parallel_streams == 0 {
            return Err(Error::config("parallel_streams must be positive"));
        }
        let spacing = 1.0 / (PI * cfg.lambda_macro).sqrt();
        let min = 5.0 * cfg.inner_radius_m.max(spacing);
        if !(self.window_radius_m >= min) || !self.window_radius_m.is_finite() {
            return Err(Error::config(format!(
                "window_radius_m must be at least 5·max(D, 1/√(πλ₁)) = {min:.1} m, got {}",
                self.window_radius_m
            )));
        }
        Ok(())
    }
}

pub type Point = [f64; 2];

/// BS chosen by a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Serving {
    pub tier: Tier,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub window_radius_m: f64,
    pub macro_points: Vec<Point>,
    pub small_points: Vec<Point>,
    /// Users other than the typical user at the origin.
    pub user_points: Vec<Point>,
    /// Small cell points sampled before the hole thinning.
    pub small_parents: usize,
    /// Parents within R − D of the origin, where the thinning sees every
    /// macro BS that could delete them.
    pub interior_parents: usize,
    pub macro_load: Vec<u32>,
    pub small_load: Vec<u32>,
    pub user_serving: Vec<Option<Serving>>,
    pub typical: Option<Serving>,
}

impl NetworkRealization {
    fn points(&self, tier: Tier) -> &[Point] {
        match tier {
            Tier::Macro => &self.macro_points,
            Tier::Small => &self.small_points,
        }
    }

    fn load(&self, tier: Tier) -> &[u32] {
        match tier {
            Tier::Macro => &self.macro_load,
            Tier::Small => &self.small_load,
        }
    }

    /// Brute-force minimum small-to-macro distance (∞ without pairs).
    pub fn min_small_macro_distance(&self) -> f64 {
        self.small_points
            .iter()
            .flat_map(|s| self.macro_points.iter().map(move |m| dist2(*s, *m)))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    pub fn total_load(&self) -> u64 {
        self.macro_load.iter().chain(&self.small_load).map(|&n| n as u64).sum()
    }
}

/// Summary of one trial as seen by the typical user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub sinr: f64,
    pub tier: Tier,
    pub serving_distance: f64,
    pub nearest_macro_distance: f64,
    /// Users of the serving cell, the typical user included.
    pub serving_load: u32,
    pub inner: bool,
    /// Small cell parents within R − D of the origin and how many survive
    /// the thinning.
    pub small_parents: u32,
    pub small_retained: u32,
    /// Small BSs within half the window radius, and how many of them are loaded.
    pub core_small: u32,
    pub core_small_loaded: u32,
    pub core_macro: u32,
    pub core_macro_loaded: u32,
}

impl TrialOutcome {
    pub fn rate(&self, bandwidth_hz: f64) -> f64 {
        bandwidth_hz / self.serving_load.max(1) as f64 * self.sinr.ln_1p() / std::f64::consts::LN_2
    }

    pub fn in_region(&self, region: Region) -> bool {
        match region {
            Region::Inner => self.inner,
            Region::Outer => !self.inner,
            Region::Overall => true,
        }
    }
}

#[derive(Clone, Copy)]
enum Stream {
    Macro = 0,
    Small = 1,
    Users = 2,
    FadingMacro = 3,
    FadingSmall = 4,
}

fn stream_rng(seed: u64, trial_index: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index.wrapping_mul(8).wrapping_add(stream as u64));
    rng
}

fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// PPP of the given density in the disk of radius `radius`, ordered by
/// distance from the origin.
/// Points of a homogeneous PPP in the disk of radius `radius`, in order of
/// increasing distance from the origin.
struct Radial<R> {
    rng: R,
    density: f64,
    area_limit: f64,
    area: f64,
}

impl<R: Rng> Radial<R> {
    fn new(rng: R, density: f64, radius: f64) -> Self {
        Radial {
            rng,
            density,
            area_limit: PI * radius * radius,
            area: 0.0,
        }
    }
}

impl<R: Rng> Iterator for Radial<R> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.density <= 0.0 || self.area > self.area_limit {
            return None;
        }
        let step: f64 = self.rng.sample(Exp1);
        self.area += step / self.density;
        if self.area > self.area_limit {
            return None;
        }
        let r = (self.area / PI).sqrt();
        let [c, s]: [f64; 2] = self.rng.sample(UnitCircle);
        Some([r * c, r * s])
    }
}

fn radial_ppp(rng: &mut impl Rng, density: f64, radius: f64) -> Vec<Point> {
    Radial::new(rng, density, radius).collect()
}

/// Density of the small cell parent process before hole thinning.
fn small_parent_density(cfg: &NetworkConfig) -> f64 {
    match cfg.scenario {
        Scenario::MacroOnly => 0.0,
        Scenario::Uniform => cfg.lambda_small_nominal,
        Scenario::NonUniformI | Scenario::NonUniformII => crate::model::effective_small_density(cfg)
            .map(|e| e.small_density_in_outer)
            .unwrap_or(f64::NAN),
    }
}

/// Bucket grid over the square [−R, R]² for nearest-neighbour queries.
/// Coordinates are stored contiguously per cell.
struct Grid {
    origin: f64,
    cell: f64,
    inv_cell: f64,
    side: usize,
    starts: Vec<u32>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    ids: Vec<u32>,
}

impl Grid {
    fn new(points: &[Point], radius: f64, per_cell: f64) -> Self {
        let side = ((points.len() as f64 / per_cell).sqrt().ceil() as usize).clamp(1, 2048);
        let cell = 2.0 * radius / side as f64;
        let mut grid = Grid {
            origin: -radius,
            cell,
            inv_cell: 1.0 / cell,
            side,
            starts: vec![0; side * side + 1],
            xs: vec![0.0; points.len()],
            ys: vec![0.0; points.len()],
            ids: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|&p| grid.key(p)).collect();
        for &k in &keys {
            grid.starts[k + 1] += 1;
        }
        for i in 0..side * side {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            let slot = fill[k] as usize;
            grid.xs[slot] = points[i][0];
            grid.ys[slot] = points[i][1];
            grid.ids[slot] = i as u32;
            fill[k] += 1;
        }
        grid
    }

    fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Indices of `points` ordered by grid cell (counting sort).
    fn bucket_order(&self, points: &[Point]) -> Vec<usize> {
        let keys: Vec<usize> = points.iter().map(|&p| self.key(p)).collect();
        let mut next = vec![0usize; self.side * self.side + 1];
        for &k in &keys {
            next[k + 1] += 1;
        }
        for i in 0..self.side * self.side {
            next[i + 1] += next[i];
        }
        let mut order = vec![0; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            order[next[k]] = i;
            next[k] += 1;
        }
        order
    }

    fn coord(&self, v: f64) -> usize {
        (((v - self.origin) * self.inv_cell).max(0.0) as usize).min(self.side - 1)
    }

    fn key(&self, p: Point) -> usize {
        self.coord(p[1]) * self.side + self.coord(p[0])
    }

    /// Scans cells x0..=x1 of row `y`, updating `best` = (slot, squared distance).
    #[inline]
    fn scan(&self, p: Point, y: usize, x0: usize, x1: usize, best: &mut (usize, f64)) {
        let row = y * self.side;
        let (a, b) = (self.starts[row + x0] as usize, self.starts[row + x1 + 1] as usize);
        let xs = &self.xs[a..b];
        let ys = &self.ys[a..b];
        let (mut bi, mut bd) = *best;
        for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
            let (dx, dy) = (x - p[0], y - p[1]);
            let d = dx * dx + dy * dy;
            let closer = d < bd;
            bd = if closer { d } else { bd };
            bi = if closer { a + k } else { bi };
        }
        *best = (bi, bd);
    }

    /// Nearest point strictly closer than √`limit2`, as (index, squared distance).
    fn nearest_within(&self, p: Point, limit2: f64) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let (cx, cy) = (self.coord(p[0]), self.coord(p[1]));
        let last = self.side - 1;
        let mut best = (usize::MAX, limit2);
        // The 3×3 block around p holds the answer in most queries.
        let (mut x0, mut x1) = (cx.saturating_sub(1), (cx + 1).min(last));
        let (mut y0, mut y1) = (cy.saturating_sub(1), (cy + 1).min(last));
        for y in y0..=y1 {
            self.scan(p, y, x0, x1, &mut best);
        }
        loop {
            // Distance from p to the nearest edge of the scanned block.
            let lo_x = p[0] - (self.origin + x0 as f64 * self.cell);
            let hi_x = self.origin + (x1 + 1) as f64 * self.cell - p[0];
            let lo_y = p[1] - (self.origin + y0 as f64 * self.cell);
            let hi_y = self.origin + (y1 + 1) as f64 * self.cell - p[1];
            let reach = lo_x.min(hi_x).min(lo_y).min(hi_y).max(0.0);
            if best.1 <= reach * reach || (x0 == 0 && y0 == 0 && x1 == last && y1 == last) {
                break;
            }
            let (nx0, nx1) = (x0.saturating_sub(1), (x1 + 1).min(last));
            let (ny0, ny1) = (y0.saturating_sub(1), (y1 + 1).min(last));
            if ny0 < y0 {
                self.scan(p, ny0, nx0, nx1, &mut best);
            }
            if ny1 > y1 {
                self.scan(p, ny1, nx0, nx1, &mut best);
            }
            for y in y0..=y1 {
                if nx0 < x0 {
                    self.scan(p, y, nx0, nx0, &mut best);
                }
                if nx1 > x1 {
                    self.scan(p, y, nx1, nx1, &mut best);
                }
            }
            (x0, x1, y0, y1) = (nx0, nx1, ny0, ny1);
        }
        (best.0 != usize::MAX).then(|| (self.ids[best.0] as usize, best.1))
    }

    fn nearest(&self, p: Point) -> Option<(usize, f64)> {
        self.nearest_within(p, f64::INFINITY)
    }

    /// True if some point lies within distance `r` (inclusive) of `p`.
    fn any_within(&self, p: Point, r: f64) -> bool {
        let r2 = r * r;
        let (x0, x1) = (self.coord(p[0] - r), self.coord(p[0] + r));
        let (y0, y1) = (self.coord(p[1] - r), self.coord(p[1] + r));
        (y0..=y1).any(|y| {
            let row = y * self.side;
            let (a, b) = (self.starts[row + x0] as usize, self.starts[row + x1 + 1] as usize);
            self.xs[a..b]
                .iter()
                .zip(&self.ys[a..b])
                .any(|(&x, &y)| (x - p[0]) * (x - p[0]) + (y - p[1]) * (y - p[1]) <= r2)
        })
    }
}

/// Draws the point processes of one trial; association and loads are empty.
pub fn sample_realization(cfg: &NetworkConfig, sim: &SimSettings, trial_index: u64) -> NetworkRealization {
    let radius = sim.window_radius_m;
    let seed = sim.seed;
    let macro_points = radial_ppp(&mut stream_rng(seed, trial_index, Stream::Macro), cfg.lambda_macro, radius);
    let small_density = small_parent_density(cfg);
    let parents = radial_ppp(&mut stream_rng(seed, trial_index, Stream::Small), small_density, radius);
    let small_parents = parents.len();
    let interior2 = (radius - cfg.inner_radius_m).max(0.0).powi(2);
    let interior_parents = parents.partition_point(|&p| dist2(p, [0.0, 0.0]) <= interior2);
    let d = cfg.inner_radius_m;
    let small_points = if cfg.scenario.is_non_uniform() && d > 0.0 {
        // Cells about D wide keep each test to a few points.
        let grid = Grid::new(&macro_points, radius, (cfg.lambda_macro * d * d).clamp(0.05, 1.0));
        parents.into_iter().filter(|&s| !grid.any_within(s, d)).collect()
    } else {
        parents
    };
    let user_points = radial_ppp(&mut stream_rng(seed, trial_index, Stream::Users), cfg.lambda_users, radius);
    NetworkRealization {
        window_radius_m: radius,
        macro_points,
        small_points,
        user_points,
        small_parents,
        interior_parents,
        macro_load: Vec::new(),
        small_load: Vec::new(),
        user_serving: Vec::new(),
        typical: None,
    }
}

/// Max average received power association of every user and the typical
/// user, with per-BS load counts.
pub fn associate_and_load(mut real: NetworkRealization, cfg: &NetworkConfig) -> NetworkRealization {
    let radius = real.window_radius_m;
    // Macro wins iff d₁² ≤ d₂² · (P₁/P₂)^{2/α}.
    let small_scale = 1.0 / cfg.small_to_macro_factor();
    let macro_grid = Grid::new(&real.macro_points, radius, 1.0);
    let small_grid = Grid::new(&real.small_points, radius, 1.0);
    let small_factor = cfg.small_to_macro_factor();
    let choose = |p: Point| -> Option<Serving> {
        let Some((i, dm)) = macro_grid.nearest(p) else {
            return small_grid.nearest(p).map(|(j, _)| Serving { tier: Tier::Small, index: j });
        };
        // Only a small BS inside d₁·(P₂/P₁)^{1/α} can win; the slack is
        // settled by the exact test below.
        match small_grid.nearest_within(p, dm * small_factor * (1.0 + 1e-9)) {
            Some((j, ds)) if dm > ds * small_scale => Some(Serving { tier: Tier::Small, index: j }),
            _ => Some(Serving { tier: Tier::Macro, index: i }),
        }
    };
    real.macro_load = vec![0; real.macro_points.len()];
    real.small_load = vec![0; real.small_points.len()];
    // Visiting users cell by cell keeps the grid scans cache-local.
    real.user_serving = vec![None; real.user_points.len()];
    for i in small_grid.bucket_order(&real.user_points) {
        real.user_serving[i] = choose(real.user_points[i]);
    }
    real.typical = choose([0.0, 0.0]);
    for s in real.user_serving.iter().chain(std::iter::once(&real.typical)).flatten() {
        match s.tier {
            Tier::Macro => real.macro_load[s.index] += 1,
            Tier::Small => real.small_load[s.index] += 1,
        }
    }
    real
}

/// SINR of the typical user with unit-mean exponential fading on every link;
/// interference comes from loaded BSs only.
pub fn sample_sinr(real: &NetworkRealization, cfg: &NetworkConfig, seed: u64, trial_index: u64) -> f64 {
    let Some(serving) = real.typical else {
        return 0.0;
    };
    let alpha = cfg.alpha();
    let path_gain = |d2: f64| if alpha == 4.0 { 1.0 / (d2 * d2) } else { d2.powf(-alpha / 2.0) };
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (tier, stream) in [(Tier::Macro, Stream::FadingMacro), (Tier::Small, Stream::FadingSmall)] {
        let mut rng = stream_rng(seed, trial_index, stream);
        let power = cfg.tier_power(tier);
        let load = real.load(tier);
        for (i, &p) in real.points(tier).iter().enumerate() {
            // One draw per BS keeps draws aligned with the radial order.
            let h: f64 = rng.sample(Exp1);
            let received = power * h * path_gain(dist2(p, [0.0, 0.0]));
            if serving.tier == tier && serving.index == i {
                signal = received;
            } else if load[i] > 0 {
                interference += received;
            }
        }
    }
    signal / (interference + cfg.noise_power())
}

/// Serving tier of the typical user in trial `trial_index`.
///
/// Draws the same streams as [`run_trial`] but generates points only out to
/// the radius that settles the association, so it returns the same tier at
/// a small fraction of the cost. `None` when the window holds no BS.
pub fn typical_association(cfg: &NetworkConfig, sim: &SimSettings, trial_index: u64) -> Option<Tier> {
    let radius = sim.window_radius_m;
    let mut macros = Radial::new(stream_rng(sim.seed, trial_index, Stream::Macro), cfg.lambda_macro, radius).peekable();
    let mut near_macros: Vec<Point> = Vec::new();
    let parents = Radial::new(
        stream_rng(sim.seed, trial_index, Stream::Small),
        small_parent_density(cfg),
        radius,
    );
    let small_scale = 1.0 / cfg.small_to_macro_factor();
    let d = cfg.inner_radius_m;
    let thinned = cfg.scenario.is_non_uniform() && d > 0.0;
    let dm = macros.peek().map_or(f64::INFINITY, |&m| dist2(m, [0.0, 0.0]));
    let mut best_small = f64::INFINITY;
    for s in parents {
        let ds = dist2(s, [0.0, 0.0]);
        // Parents arrive by increasing distance; none beyond this can win.
        if ds * small_scale * (1.0 - 1e-9) >= dm || ds > best_small * (1.0 + 1e-9) {
            break;
        }
        if thinned {
            let reach = ds.sqrt() + d;
            while let Some(&m) = macros.peek() {
                if dist2(m, [0.0, 0.0]) > reach * reach {
                    break;
                }
                near_macros.push(m);
                macros.next();
            }
            if near_macros.iter().any(|&m| dist2(m, s) <= d * d) {
                continue;
            }
        }
        best_small = best_small.min(ds);
    }
    match (dm.is_finite(), best_small.is_finite()) {
        (false, false) => None,
        (true, true) if dm > best_small * small_scale => Some(Tier::Small),
        (false, true) => Some(Tier::Small),
        _ => Some(Tier::Macro),
    }
}

/// Fraction of trials whose typical user is macro-served, with its Wilson
/// interval; see [`typical_association`].
pub fn estimate_macro_association(cfg: &NetworkConfig, sim: &SimSettings) -> Result<(f64, (f64, f64))> {
    cfg.validate()?;
    sim.validate(cfg)?;
    let k = (0..sim.trials as u64)
        .filter(|&t| typical_association(cfg, sim, t) == Some(Tier::Macro))
        .count();
    Ok((k as f64 / sim.trials as f64, wilson_interval(k, sim.trials)))
}

/// Runs one complete trial.
pub fn run_trial(cfg: &NetworkConfig, sim: &SimSettings, trial_index: u64) -> TrialOutcome {
    let real = associate_and_load(sample_realization(cfg, sim, trial_index), cfg);
    let sinr = sample_sinr(&real, cfg, sim.seed, trial_index);
    let nearest_macro_distance = real
        .macro_points
        .first()
        .map_or(f64::INFINITY, |&p| dist2(p, [0.0, 0.0]).sqrt());
    let (tier, serving_distance, serving_load) = match real.typical {
        Some(s) => {
            let load = real.load(s.tier)[s.index];
            assert!(load >= 1, "serving BS of the typical user must be loaded");
            (s.tier, dist2(real.points(s.tier)[s.index], [0.0, 0.0]).sqrt(), load)
        }
        None => (Tier::Macro, f64::INFINITY, 1),
    };
    let core2 = (0.5 * sim.window_radius_m).powi(2);
    let core = |tier: Tier| {
        let pts = real.points(tier);
        let load = real.load(tier);
        let mut total = 0;
        let mut loaded = 0;
        for (i, &p) in pts.iter().enumerate() {
            if dist2(p, [0.0, 0.0]) <= core2 {
                total += 1;
                loaded += (load[i] > 0) as u32;
            }
        }
        (total, loaded)
    };
    let (core_small, core_small_loaded) = core(Tier::Small);
    let (core_macro, core_macro_loaded) = core(Tier::Macro);
    TrialOutcome {
        sinr,
        tier,
        serving_distance,
        nearest_macro_distance,
        serving_load,
        inner: nearest_macro_distance <= cfg.inner_radius_m,
        small_parents: real.interior_parents as u32,
        small_retained: real
            .small_points
            .partition_point(|&p| dist2(p, [0.0, 0.0]) <= (sim.window_radius_m - cfg.inner_radius_m).max(0.0).powi(2))
            as u32,
        core_small,
        core_small_loaded,
        core_macro,
        core_macro_loaded,
    }
}

fn run_range(cfg: &NetworkConfig, sim: &SimSettings, range: std::ops::Range<u64>) -> Vec<TrialOutcome> {
    range.map(|i| run_trial(cfg, sim, i)).collect()
}

fn chunks(trials: usize, streams: usize) -> Vec<std::ops::Range<u64>> {
    let n = streams.min(trials).max(1);
    (0..n)
        .map(|k| (trials * k / n) as u64..(trials * (k + 1) / n) as u64)
        .collect()
}

#[cfg(feature = "parallel")]
fn run_parallel(cfg: &NetworkConfig, sim: &SimSettings) -> Vec<TrialOutcome> {
    use rayon::prelude::*;
    let work = || {
        chunks(sim.trials, sim.parallel_streams)
            .into_par_iter()
            .map(|r| run_range(cfg, sim, r))
            .collect::<Vec<_>>()
            .concat()
    };
    match std::env::var("HETNET_SG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        _ => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(cfg: &NetworkConfig, sim: &SimSettings) -> Vec<TrialOutcome> {
    run_sequential(cfg, sim)
}

fn run_sequential(cfg: &NetworkConfig, sim: &SimSettings) -> Vec<TrialOutcome> {
    chunks(sim.trials, sim.parallel_streams)
        .into_iter()
        .flat_map(|r| run_range(cfg, sim, r))
        .collect()
}

/// Outcomes of all trials, in trial-index order.
#[derive(Debug, Clone)]
pub struct TrialSet {
    pub cfg: NetworkConfig,
    pub sim: SimSettings,
    pub outcomes: Vec<TrialOutcome>,
}

pub fn run_trials(cfg: &NetworkConfig, sim: &SimSettings) -> Result<TrialSet> {
    cfg.validate()?;
    sim.validate(cfg)?;
    let outcomes = match sim.execution {
        Execution::Parallel => run_parallel(cfg, sim),
        Execution::Sequential => run_sequential(cfg, sim),
    };
    Ok(TrialSet {
        cfg: cfg.clone(),
        sim: sim.clone(),
        outcomes,
    })
}

/// Wilson score interval at 95% for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Empirical CCDF P[value > threshold] with Wilson intervals.
fn empirical_ccdf(mut values: Vec<f64>, thresholds: &[f64]) -> (Vec<f64>, Vec<(f64, f64)>) {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    thresholds
        .iter()
        .map(|&t| {
            let k = n - values.partition_point(|&v| v <= t);
            (k as f64 / n as f64, wilson_interval(k, n))
        })
        .unzip()
}

impl TrialSet {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    fn in_region(&self, region: Region) -> impl Iterator<Item = &TrialOutcome> {
        self.outcomes.iter().filter(move |o| o.in_region(region))
    }

    fn region_values(&self, region: Region, f: impl Fn(&TrialOutcome) -> f64) -> Result<Vec<f64>> {
        let values: Vec<f64> = self.in_region(region).map(f).collect();
        if values.is_empty() {
            return Err(Error::Experiment(format!(
                "no trials fell in the {} region",
                region.name()
            )));
        }
        Ok(values)
    }

    fn curve(&self, region: Region, thresholds: &[f64], axis: Vec<f64>, values: Vec<f64>) -> CcdfCurve {
        let (v, ci) = empirical_ccdf(values, thresholds);
        CcdfCurve {
            thresholds: axis,
            values: v,
            method: Method::MonteCarlo,
            scenario: self.cfg.scenario,
            region,
            intervals: Some(ci),
        }
    }

    /// Coverage CCDF over SINR thresholds given in dB.
    pub fn coverage_curve(&self, region: Region, thresholds_db: &[f64]) -> Result<CcdfCurve> {
        let values = self.region_values(region, |o| o.sinr)?;
        let linear: Vec<f64> = thresholds_db.iter().map(|&t| db_to_linear(t)).collect();
        Ok(self.curve(region, &linear, thresholds_db.to_vec(), values))
    }

    /// Rate CCDF; each trial's rate is W / load · log₂(1 + SINR).
    pub fn throughput_curve(&self, region: Region, rates: &[f64]) -> Result<CcdfCurve> {
        let w = self.cfg.bandwidth_hz;
        let values = self.region_values(region, |o| o.rate(w))?;
        Ok(self.curve(region, rates, rates.to_vec(), values))
    }

    /// Fraction of trials whose typical user is macro-served.
    pub fn macro_association(&self) -> f64 {
        let k = self.outcomes.iter().filter(|o| o.tier == Tier::Macro).count();
        k as f64 / self.len() as f64
    }

    /// Fraction of trials whose typical user is in the inner region.
    pub fn inner_fraction(&self) -> f64 {
        self.outcomes.iter().filter(|o| o.inner).count() as f64 / self.len() as f64
    }

    /// Pooled fraction of interior small cell parents that survive the hole
    /// thinning.
    pub fn small_survival_fraction(&self) -> f64 {
        let parents: u64 = self.outcomes.iter().map(|o| o.small_parents as u64).sum();
        let kept: u64 = self.outcomes.iter().map(|o| o.small_retained as u64).sum();
        kept as f64 / parents as f64
    }

    /// Pooled fraction of BSs of `tier` near the origin that have users.
    pub fn loaded_fraction(&self, tier: Tier) -> f64 {
        let (total, loaded) = self.outcomes.iter().fold((0u64, 0u64), |(t, l), o| match tier {
            Tier::Macro => (t + o.core_macro as u64, l + o.core_macro_loaded as u64),
            Tier::Small => (t + o.core_small as u64, l + o.core_small_loaded as u64),
        });
        loaded as f64 / total as f64
    }

    /// Serving distances matching a conditional law: inner-region users
    /// served by the macro tier, and outer-region users of either tier.
    pub fn serving_distances(&self, which: PdfRegion) -> Vec<f64> {
        let (region, tier) = match which {
            PdfRegion::Inner => (Region::Inner, Tier::Macro),
            PdfRegion::OuterTier1 => (Region::Outer, Tier::Macro),
            PdfRegion::OuterTier2 => (Region::Outer, Tier::Small),
        };
        self.in_region(region)
            .filter(|o| o.tier == tier && o.serving_distance.is_finite())
            .map(|o| o.serving_distance)
            .collect()
    }
}

pub fn estimate_coverage_ccdf(
    cfg: &NetworkConfig,
    sim: &SimSettings,
    thresholds_db: &[f64],
) -> Result<CcdfCurve> {
    run_trials(cfg, sim)?.coverage_curve(Region::Overall, thresholds_db)
}

pub fn estimate_throughput_ccdf(cfg: &NetworkConfig, sim: &SimSettings, rates_bps: &[f64]) -> Result<CcdfCurve> {
    run_trials(cfg, sim)?.throughput_curve(Region::Overall, rates_bps)
}
