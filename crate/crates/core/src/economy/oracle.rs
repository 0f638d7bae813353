use rayon::prelude::*;

use super::upper::{cobb_douglas_level_samples, COBB_DOUGLAS_SAMPLES};
use super::{Economy, Preference};
use crate::capacity::split;
use crate::choquet::{vector_integral, Allocation};
use crate::error::{Error, Result};
use crate::lp::{solve_f64, Arith, Cmp, Lp, LpOutcome};
use crate::regions::Region;

/// Margin by which an improving bundle must beat the current one in the
/// linear searches.
pub const EPS_STRICT: f64 = 1e-7;

const MAX_GRID_POINTS: usize = 400_000;
const MASS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Resources balance over the whole coalition.
    Weak,
    /// Resources balance inside every block of the coalition.
    Strong,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreStatus {
    InCore,
    Improved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoundBy {
    /// A point of the mass grid.
    Grid,
    /// Off-grid masses; the grid was too coarse to hold any witness.
    OffGrid,
}

#[derive(Clone, Debug)]
pub struct CoreVerdict {
    pub status: CoreStatus,
    pub mode: Mode,
    pub grid: usize,
    /// Coalition mass inside each block.
    pub masses: Vec<f64>,
    /// Improving bundle for each block the coalition meets.
    pub improving: Vec<Option<Vec<f64>>>,
    pub found_by: Option<FoundBy>,
    /// The witness keeps every member's endowment, blockwise.
    pub strong_witness: bool,
    /// An actual coalition, when the capacity can be split.
    pub coalition: Option<Region>,
    /// The witness passed the independent re-check.
    pub verified: bool,
}

impl CoreVerdict {
    pub fn is_improved(&self) -> bool {
        self.status == CoreStatus::Improved
    }

    fn in_core(mode: Mode, grid: usize, r: usize) -> Self {
        CoreVerdict {
            status: CoreStatus::InCore,
            mode,
            grid,
            masses: vec![0.0; r],
            improving: vec![None; r],
            found_by: None,
            strong_witness: false,
            coalition: None,
            verified: true,
        }
    }
}

/// What an improving bundle must beat on part of a block.
#[derive(Clone, Debug)]
enum Requirement {
    Utility(f64),
    /// Floors on the listed coordinates.
    Floors(Vec<usize>, Vec<f64>),
}

/// A part of a block where the allocation is no better than a threshold.
#[derive(Clone, Debug)]
struct BlockOption {
    region: Region,
    mass: f64,
    requirement: Requirement,
}

/// Nested lower sets of `f` inside each block, from the worst-off agents
/// outward.
fn block_options(eco: &Economy, f: &Allocation) -> Result<Vec<Vec<BlockOption>>> {
    let mu = eco.capacity();
    let mut out = Vec::new();
    for (i, block) in eco.blocks().iter().enumerate() {
        let mut pieces = f.values_on(block)?;
        let pref = eco.preference(i);
        let key = |x: &[f64]| match pref {
            Preference::CoordinateList(j) => j.iter().map(|&k| x[k]).sum(),
            p => p.utility(x).expect("utility preference"),
        };
        pieces.sort_by(|a, b| key(&a.1).total_cmp(&key(&b.1)));
        let mut opts: Vec<BlockOption> = Vec::new();
        let mut region = block.universe().empty();
        let mut floors = vec![f64::NEG_INFINITY; eco.dim()];
        let mut level = f64::NEG_INFINITY;
        for (k, (r, x)) in pieces.iter().enumerate() {
            region = region.union(r)?;
            level = level.max(key(x));
            floors.iter_mut().zip(x).for_each(|(a, b)| *a = a.max(*b));
            if k + 1 < pieces.len() && key(&pieces[k + 1].1) == key(x) && !matches!(pref, Preference::CoordinateList(_)) {
                continue;
            }
            let mass = mu.evaluate(&region)?;
            if mass <= 0.0 {
                continue;
            }
            let requirement = match pref {
                Preference::CoordinateList(j) => Requirement::Floors(j.clone(), floors.clone()),
                _ => Requirement::Utility(level),
            };
            opts.push(BlockOption { region: region.clone(), mass, requirement });
        }
        out.push(opts);
    }
    Ok(out)
}

/// Searches for a coalition that can improve on `f`. Coalitions are given
/// by their mass inside each block, on the grid `{0, μ(Eᵢ)/K, …, μ(Eᵢ)}`,
/// and improving allocations are constant on each block. The first witness
/// in decreasing lexicographic order of the mass vector is returned.
///
/// In strong mode each block of the coalition must keep its own endowment,
/// so the test reduces to `eᵢ ≻ f` there. In weak mode strong-type
/// witnesses are tried first; then one homogeneous linear program decides
/// whether any coalition at all can improve, and only then is the grid
/// scanned.
pub fn improvement_oracle(eco: &Economy, f: &Allocation, mode: Mode, grid: usize) -> Result<CoreVerdict> {
    if grid == 0 {
        return Err(Error::Domain("grid must be positive".into()));
    }
    if !f.is_nonnegative() || f.dim() != eco.dim() {
        return Err(Error::Domain("allocation must be nonnegative with one entry per commodity".into()));
    }
    let r = eco.len();
    if let Some(v) = strong_witness(eco, f, mode, grid)? {
        return Ok(v);
    }
    if mode == Mode::Strong {
        return Ok(CoreVerdict::in_core(mode, grid, r));
    }
    let options = block_options(eco, f)?;
    let lowest: Vec<Option<&BlockOption>> = options.iter().map(|o| o.first()).collect();
    let Some((s, y)) = prescreen(eco, &lowest)? else {
        return Ok(CoreVerdict::in_core(mode, grid, r));
    };
    let points = (grid + 1).checked_pow(r as u32).filter(|&p| p <= MAX_GRID_POINTS).ok_or_else(|| {
        Error::Precondition(format!("a grid of {grid} over {r} blocks has too many points"))
    })?;
    let found = (0..points - 1).into_par_iter().find_map_first(|t| {
        let k = grid_point(points - 1 - t, grid, r);
        let masses: Vec<f64> = k.iter().zip(eco.masses()).map(|(&ki, m)| ki as f64 * m / grid as f64).collect();
        let chosen: Vec<Option<&BlockOption>> = options
            .iter()
            .zip(&masses)
            .map(|(opts, &s)| if s > 0.0 { opts.iter().find(|o| o.mass >= s * (1.0 - MASS_TOL)) } else { None })
            .collect();
        if chosen.iter().zip(&masses).any(|(c, &s)| s > 0.0 && c.is_none()) {
            return None;
        }
        match fixed_mass_lp(eco, &chosen, &masses) {
            Ok(Some(g)) => Some(Ok((masses, chosen, g))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    });
    let (masses, chosen, improving, found_by) = match found.transpose()? {
        Some((masses, chosen, g)) => (masses, chosen, g, FoundBy::Grid),
        None => {
            // shrink the prescreen solution until it fits the lowest options
            let factor = s
                .iter()
                .zip(&lowest)
                .filter(|(si, _)| **si > 0.0)
                .map(|(si, o)| o.map_or(0.0, |o| o.mass) / si)
                .fold(f64::INFINITY, f64::min);
            let masses: Vec<f64> = s.iter().map(|v| v * factor).collect();
            let g = s
                .iter()
                .zip(&y)
                .map(|(si, yi)| (*si > 0.0).then(|| yi.iter().map(|v| v / si).collect()))
                .collect();
            (masses, lowest.clone(), g, FoundBy::OffGrid)
        }
    };
    let regions: Vec<Option<Region>> = chosen.iter().map(|c| c.map(|o| o.region.clone())).collect();
    let mut verdict = CoreVerdict {
        status: CoreStatus::Improved,
        mode,
        grid,
        masses,
        improving,
        found_by: Some(found_by),
        strong_witness: false,
        coalition: None,
        verified: false,
    };
    finish(eco, f, &mut verdict, &regions)?;
    Ok(verdict)
}

/// Digits of `index` in base `grid + 1`, most significant first.
fn grid_point(mut index: usize, grid: usize, r: usize) -> Vec<usize> {
    let mut k = vec![0; r];
    for slot in k.iter_mut().rev() {
        *slot = index % (grid + 1);
        index /= grid + 1;
    }
    k
}

/// Blocks where some agents strictly prefer their endowment to `f`. The
/// lexicographically largest grid vector inside those masses is the first
/// strong witness.
fn strong_witness(eco: &Economy, f: &Allocation, mode: Mode, grid: usize) -> Result<Option<CoreVerdict>> {
    let mu = eco.capacity();
    let r = eco.len();
    let mut regions: Vec<Option<Region>> = vec![None; r];
    let mut avail = vec![0.0; r];
    for (i, block) in eco.blocks().iter().enumerate() {
        let e = eco.endowment(i);
        let mut d = block.universe().empty();
        for (part, x) in f.values_on(block)? {
            if eco.preference(i).prefers(e, &x) {
                d = d.union(&part)?;
            }
        }
        avail[i] = mu.evaluate(&d)?;
        if avail[i] > 0.0 {
            regions[i] = Some(d);
        }
    }
    if avail.iter().all(|&a| a <= 0.0) {
        return Ok(None);
    }
    let on_grid: Vec<f64> = avail
        .iter()
        .zip(eco.masses())
        .map(|(a, m)| (a / m * grid as f64 + 1e-9).floor().min(grid as f64) * m / grid as f64)
        .collect();
    let (masses, found_by) =
        if on_grid.iter().any(|&s| s > 0.0) { (on_grid, FoundBy::Grid) } else { (avail, FoundBy::OffGrid) };
    let regions: Vec<Option<Region>> =
        regions.into_iter().zip(&masses).map(|(reg, &s)| if s > 0.0 { reg } else { None }).collect();
    let improving = (0..r).map(|i| (masses[i] > 0.0).then(|| eco.endowment(i).to_vec())).collect();
    let mut verdict = CoreVerdict {
        status: CoreStatus::Improved,
        mode,
        grid,
        masses,
        improving,
        found_by: Some(found_by),
        strong_witness: true,
        coalition: None,
        verified: false,
    };
    finish(eco, f, &mut verdict, &regions)?;
    Ok(Some(verdict))
}

fn finish(eco: &Economy, f: &Allocation, verdict: &mut CoreVerdict, regions: &[Option<Region>]) -> Result<()> {
    if eco.capacity().is_constructive() {
        let mut s = eco.capacity().universe().empty();
        for (reg, &m) in regions.iter().zip(&verdict.masses) {
            if let (Some(reg), true) = (reg, m > 0.0) {
                let total = eco.capacity().evaluate(reg)?;
                s = s.union(&split(eco.capacity(), reg, (m / total).min(1.0))?)?;
            }
        }
        verdict.coalition = Some(s);
    }
    if !verify_improvement(eco, f, verdict, regions)? {
        return Err(Error::Internal("improvement witness failed its independent re-check".into()));
    }
    verdict.verified = true;
    Ok(())
}

/// Variables and constraints shared by the prescreen and the grid search:
/// for each active block, an improving amount `yᵢ` (or bundle when the
/// mass is fixed) together with the weights needed to express the
/// requirement.
struct Builder {
    cols: usize,
    rows: Vec<(Vec<(usize, f64)>, Cmp, f64)>,
}

impl Builder {
    fn var(&mut self, k: usize) -> usize {
        let start = self.cols;
        self.cols += k;
        start
    }

    fn lp(&self) -> Lp<f64> {
        let mut lp = Lp::feasibility(self.cols);
        for (terms, cmp, rhs) in &self.rows {
            let mut row = vec![0.0; self.cols];
            for &(c, v) in terms {
                row[c] += v;
            }
            lp.push(row, *cmp, *rhs);
        }
        lp
    }
}

/// Adds `y ∈ s·U` for the strict requirement set `U`, where `s_col` is the
/// mass column (or `None` for a fixed unit mass).
fn add_requirement(b: &mut Builder, eco: &Economy, i: usize, opt: &BlockOption, y: usize, s_col: Option<usize>) {
    let n = eco.dim();
    let scaled = |c: Option<usize>, v: f64, terms: &mut Vec<(usize, f64)>| -> f64 {
        match c {
            Some(col) => {
                terms.push((col, -v));
                0.0
            }
            None => v,
        }
    };
    match (&opt.requirement, eco.preference(i)) {
        (Requirement::Floors(j, floors), _) => {
            for &k in j {
                let mut terms = vec![(y + k, 1.0)];
                let rhs = scaled(s_col, floors[k] + EPS_STRICT, &mut terms);
                b.rows.push((terms, Cmp::Ge, rhs));
            }
        }
        (Requirement::Utility(level), Preference::CobbDouglas(u)) => {
            let pts = cobb_douglas_level_samples(u, level.max(0.0) + EPS_STRICT, eco.endowment(i), COBB_DOUGLAS_SAMPLES);
            let lam = b.var(pts.len());
            let mut terms: Vec<(usize, f64)> = (0..pts.len()).map(|k| (lam + k, 1.0)).collect();
            let rhs = scaled(s_col, 1.0, &mut terms);
            b.rows.push((terms, Cmp::Eq, rhs));
            for j in 0..n {
                let mut terms = vec![(y + j, 1.0)];
                terms.extend(pts.iter().enumerate().map(|(k, x)| (lam + k, -x[j])));
                b.rows.push((terms, Cmp::Ge, 0.0));
            }
        }
        (Requirement::Utility(level), pref) => {
            let pieces: Vec<(Vec<f64>, f64)> = match pref {
                Preference::Polyhedral(u) => u.majorants().to_vec(),
                Preference::Linear(c) => vec![(c.clone(), 0.0)],
                _ => unreachable!("utility requirement on a coordinate list"),
            };
            for (a, c) in pieces {
                let mut terms: Vec<(usize, f64)> = a.iter().enumerate().map(|(j, v)| (y + j, *v)).collect();
                let rhs = scaled(s_col, level + EPS_STRICT - c, &mut terms);
                b.rows.push((terms, Cmp::Ge, rhs));
            }
        }
    }
}

/// Homogeneous search over all coalitions at once: masses `sᵢ` with
/// `Σ sᵢ = 1`, amounts `yᵢ = sᵢ gᵢ`, `Σ yᵢ = Σ sᵢ eᵢ`. Feasible exactly
/// when some coalition, at some scale, can improve.
fn prescreen(eco: &Economy, opts: &[Option<&BlockOption>]) -> Result<Option<(Vec<f64>, Vec<Vec<f64>>)>> {
    let n = eco.dim();
    let mut b = Builder { cols: 0, rows: Vec::new() };
    let mut cols = Vec::new();
    for (i, o) in opts.iter().enumerate() {
        if let Some(o) = o {
            let s = b.var(1);
            let y = b.var(n);
            add_requirement(&mut b, eco, i, o, y, Some(s));
            cols.push((i, s, y));
        }
    }
    if cols.is_empty() {
        return Ok(None);
    }
    b.rows.push((cols.iter().map(|&(_, s, _)| (s, 1.0)).collect(), Cmp::Eq, 1.0));
    for j in 0..n {
        let mut terms = Vec::new();
        for &(i, s, y) in &cols {
            terms.push((y + j, 1.0));
            terms.push((s, -eco.endowment(i)[j]));
        }
        b.rows.push((terms, Cmp::Eq, 0.0));
    }
    let lp = b.lp();
    let arith = Arith::choose(n, lp.constraints.len() + lp.num_vars);
    let LpOutcome::Optimal { x, .. } = solve_f64(&lp, arith)? else {
        return Ok(None);
    };
    let mut s = vec![0.0; eco.len()];
    let mut y = vec![vec![0.0; n]; eco.len()];
    for &(i, sc, yc) in &cols {
        s[i] = x[sc];
        y[i] = x[yc..yc + n].to_vec();
    }
    Ok(Some((s, y)))
}

/// Improving bundles for fixed coalition masses, if any.
fn fixed_mass_lp(eco: &Economy, chosen: &[Option<&BlockOption>], masses: &[f64]) -> Result<Option<Vec<Option<Vec<f64>>>>> {
    let n = eco.dim();
    let mut b = Builder { cols: 0, rows: Vec::new() };
    let mut cols = Vec::new();
    for (i, o) in chosen.iter().enumerate() {
        if let Some(o) = o {
            let g = b.var(n);
            add_requirement(&mut b, eco, i, o, g, None);
            cols.push((i, g));
        }
    }
    for j in 0..n {
        let terms = cols.iter().map(|&(i, g)| (g + j, masses[i])).collect();
        let rhs: f64 = cols.iter().map(|&(i, _)| masses[i] * eco.endowment(i)[j]).sum();
        b.rows.push((terms, Cmp::Eq, rhs));
    }
    let LpOutcome::Optimal { x, .. } = solve_f64(&b.lp(), Arith::Float)? else {
        return Ok(None);
    };
    let mut out = vec![None; eco.len()];
    for &(i, g) in &cols {
        out[i] = Some(x[g..g + n].iter().map(|v| v.max(0.0)).collect());
    }
    Ok(Some(out))
}

/// Re-checks an improvement from scratch: masses fit inside the regions,
/// every agent in them strictly prefers the new bundle to every bundle `f`
/// gives there, and resources balance (blockwise in strong mode). When a
/// concrete coalition is attached, its integrals are recomputed too.
pub fn verify_improvement(
    eco: &Economy,
    f: &Allocation,
    v: &CoreVerdict,
    regions: &[Option<Region>],
) -> Result<bool> {
    if !v.is_improved() {
        return Ok(true);
    }
    let mu = eco.capacity();
    let n = eco.dim();
    let mut lhs = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut any = false;
    for i in 0..eco.len() {
        let s = v.masses[i];
        if s <= 0.0 {
            continue;
        }
        any = true;
        let (Some(g), Some(reg)) = (&v.improving[i], &regions[i]) else {
            return Ok(false);
        };
        if !reg.is_subset_of(&eco.blocks()[i])? || s > mu.evaluate(reg)? * (1.0 + MASS_TOL) {
            return Ok(false);
        }
        for (_, x) in f.values_on(reg)? {
            if !eco.preference(i).prefers(g, &x) {
                return Ok(false);
            }
        }
        if v.strong_witness && g.as_slice() != eco.endowment(i) {
            return Ok(false);
        }
        for j in 0..n {
            lhs[j] += s * g[j];
            rhs[j] += s * eco.endowment(i)[j];
        }
    }
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-8 * (1.0 + y.abs()));
    if !any || !close(&lhs, &rhs) {
        return Ok(false);
    }
    if let Some(s) = &v.coalition {
        let mut g_alloc = eco.endowment_allocation();
        let e_alloc = eco.endowment_allocation();
        for (i, block) in eco.blocks().iter().enumerate() {
            let part = s.intersect(block)?;
            if v.masses[i] > 0.0 {
                if (mu.evaluate(&part)? - v.masses[i]).abs() > 1e-8 * (1.0 + v.masses[i]) {
                    return Ok(false);
                }
                g_alloc = g_alloc.overwrite(&part, v.improving[i].as_ref().expect("checked above"))?;
            } else if mu.evaluate(&part)? > 0.0 {
                return Ok(false);
            }
        }
        if v.strong_witness {
            for block in eco.blocks() {
                let part = s.intersect(block)?;
                if !close(&vector_integral(mu, &g_alloc, &part)?, &vector_integral(mu, &e_alloc, &part)?) {
                    return Ok(false);
                }
            }
        } else if !close(&vector_integral(mu, &g_alloc, s)?, &vector_integral(mu, &e_alloc, s)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::instances::{collinear, coordinate_list_example};
    use super::*;

    #[test]
    fn endowment_is_in_the_core() {
        let eco = collinear();
        let e = eco.endowment_allocation();
        for mode in [Mode::Strong, Mode::Weak] {
            let v = improvement_oracle(&eco, &e, mode, 16).unwrap();
            assert_eq!(v.status, CoreStatus::InCore, "{mode:?}");
        }
    }

    #[test]
    fn worse_block_is_improved_by_its_endowment() {
        let eco = collinear();
        let f = eco.simple_allocation(&[vec![0.5, 2.0], vec![2.5, 1.0]]).unwrap();
        let v = improvement_oracle(&eco, &f, Mode::Strong, 16).unwrap();
        assert!(v.is_improved() && v.verified && v.strong_witness);
        assert_eq!(v.masses, vec![0.0, 1.0]);
        assert_eq!(v.improving[1], Some(vec![2.0, 2.0]));
        let s = v.coalition.unwrap();
        assert_eq!(s, eco.blocks()[1]);
    }

    #[test]
    fn weak_search_finds_a_trade() {
        // two linear agents valuing different goods, each holding only
        // what the other wants more of
        let eco = super::super::instances::linear_swap();
        let e = eco.endowment_allocation();
        let strong = improvement_oracle(&eco, &e, Mode::Strong, 8).unwrap();
        assert!(!strong.is_improved());
        let weak = improvement_oracle(&eco, &e, Mode::Weak, 8).unwrap();
        assert!(weak.is_improved() && weak.verified && !weak.strong_witness);
        assert_eq!(weak.found_by, Some(FoundBy::Grid));
        assert_eq!(weak.masses, vec![1.0, 1.0]);
    }

    #[test]
    fn infeasible_improvements_are_pruned() {
        // everyone strictly better off would need more than the total
        let eco = collinear();
        let f = eco.simple_allocation(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let v = improvement_oracle(&eco, &f, Mode::Weak, 4).unwrap();
        assert!(!v.is_improved());
    }

    #[test]
    fn coordinate_lists_keep_the_endowment() {
        let eco = coordinate_list_example();
        let v = improvement_oracle(&eco, &eco.endowment_allocation(), Mode::Strong, 8).unwrap();
        assert!(!v.is_improved());
    }

    #[test]
    fn grid_points_descend() {
        assert_eq!(grid_point(8, 2, 2), vec![2, 2]);
        assert_eq!(grid_point(7, 2, 2), vec![2, 1]);
        assert_eq!(grid_point(1, 2, 2), vec![0, 1]);
    }
}
