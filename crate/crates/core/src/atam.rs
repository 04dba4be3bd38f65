//! Abstract Tile Assembly Model at temperature 2 with an L-shaped seed.
//!
//! The seed occupies `[0, m] x {0} ∪ {0} x [0, n]` and only its exposed
//! glues matter: the north glue of each `(x, 0)` and the east glue of each
//! `(0, y)`. Rule tiles attach inside `[1, m] x [1, n]` once the bond
//! strength to placed neighbours reaches the temperature.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::error::{AssemblyError, ParseError};
use crate::mgta::{Direction, GlueTuple, MgtaState};
use crate::partition::Partition;
use crate::pattern::{Colour, Pattern};

pub type Glue = u32;

pub const TEMPERATURE: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileType {
    pub north: Glue,
    pub east: Glue,
    pub south: Glue,
    pub west: Glue,
    pub colour: Colour,
}

impl TileType {
    pub fn new(glues: GlueTuple, colour: Colour) -> Self {
        let [north, east, south, west] = glues;
        Self {
            north,
            east,
            south,
            west,
            colour,
        }
    }

    pub fn glue(&self, dir: Direction) -> Glue {
        match dir {
            Direction::North => self.north,
            Direction::East => self.east,
            Direction::South => self.south,
            Direction::West => self.west,
        }
    }

    pub fn glues(&self) -> GlueTuple {
        [self.north, self.east, self.south, self.west]
    }

    /// The pair that selects this tile during growth.
    pub fn inputs(&self) -> (Glue, Glue) {
        (self.south, self.west)
    }
}

/// Exposed glues of the L-shaped seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeedAssembly {
    /// North glue of `(x, 0)` for `x = 1..=m`.
    pub south_row: Vec<Glue>,
    /// East glue of `(0, y)` for `y = 1..=n`.
    pub west_column: Vec<Glue>,
}

impl SeedAssembly {
    pub fn width(&self) -> usize {
        self.south_row.len()
    }

    pub fn height(&self) -> usize {
        self.west_column.len()
    }
}

/// Glue strengths: equal glues bind with strength 1 unless overridden,
/// distinct glues never bind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GlueStrength {
    overrides: BTreeMap<Glue, u32>,
}

impl GlueStrength {
    pub fn set(&mut self, glue: Glue, strength: u32) {
        self.overrides.insert(glue, strength);
    }

    pub fn strength(&self, a: Glue, b: Glue) -> u32 {
        if a != b {
            0
        } else {
            self.overrides.get(&a).copied().unwrap_or(1)
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.overrides.values().all(|&s| s == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSystem {
    pub tiles: Vec<TileType>,
    pub seed: SeedAssembly,
    pub strength: GlueStrength,
}

/// A completed or partial assembly of the rule region; the seed is implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembly {
    width: usize,
    height: usize,
    /// Index into the system's tile list, row-major from the southern row.
    sites: Vec<Option<usize>>,
}

impl Assembly {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn tile_at(&self, x: usize, y: usize) -> Option<usize> {
        self.sites[(y - 1) * self.width + (x - 1)]
    }

    pub fn sites(&self) -> &[Option<usize>] {
        &self.sites
    }

    pub fn filled(&self) -> usize {
        self.sites.iter().filter(|s| s.is_some()).count()
    }

    /// Partition of the grid by tile type; `None` unless complete.
    pub fn partition(&self) -> Option<Partition> {
        let labels: Option<Vec<usize>> = self.sites.iter().copied().collect();
        labels.map(|l| Partition::from_labels(self.width, self.height, &l))
    }
}

/// Outcome of checking a tile system against a pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// A rule tile carries a glue whose strength is not 1.
    P1 { tile: usize, glue: Glue, strength: u32 },
    /// The terminal assembly does not fill `[0, m] x [0, n]`.
    P2 { x: usize, y: usize, reason: String },
    /// The terminal assembly shows the wrong colour.
    P3 {
        x: usize,
        y: usize,
        expected: Colour,
        found: Colour,
    },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok => write!(f, "OK"),
            Verdict::P1 {
                tile,
                glue,
                strength,
            } => write!(f, "P1 violated: tile {tile} glue {glue} has strength {strength}"),
            Verdict::P2 { x, y, reason } => write!(f, "P2 violated at ({x}, {y}): {reason}"),
            Verdict::P3 {
                x,
                y,
                expected,
                found,
            } => write!(
                f,
                "P3 violated at ({x}, {y}): expected colour {expected}, found {found}"
            ),
        }
    }
}

/// At most one tile per `(south, west)` glue pair.
pub fn is_deterministic(tiles: &[TileType]) -> bool {
    first_input_clash(tiles).is_none()
}

fn first_input_clash(tiles: &[TileType]) -> Option<(usize, usize)> {
    let mut seen: HashMap<(Glue, Glue), usize> = HashMap::with_capacity(tiles.len());
    for (i, t) in tiles.iter().enumerate() {
        if let Some(&j) = seen.get(&t.inputs()) {
            return Some((j, i));
        }
        seen.insert(t.inputs(), i);
    }
    None
}

/// Runs the assembly to its terminal state.
///
/// Requires a deterministic tile set. Sites are filled by a row-major sweep,
/// repeated until nothing attaches.
pub fn assemble(
    system: &TileSystem,
    width: usize,
    height: usize,
) -> Result<Assembly, AssemblyError> {
    if let Some((a, b)) = first_input_clash(&system.tiles) {
        return Err(AssemblyError::Nondeterministic(a, b));
    }
    grow(system, width, height, None)
}

/// As [`assemble`], but attaches tiles at frontier sites picked uniformly at
/// random. Deterministic systems reach the same terminal assembly.
pub fn assemble_random_order<R: RngCore>(
    system: &TileSystem,
    width: usize,
    height: usize,
    rng: &mut R,
) -> Result<Assembly, AssemblyError> {
    if let Some((a, b)) = first_input_clash(&system.tiles) {
        return Err(AssemblyError::Nondeterministic(a, b));
    }
    grow(system, width, height, Some(rng))
}

fn check_seed(system: &TileSystem, width: usize, height: usize) -> Result<(), AssemblyError> {
    if system.seed.width() != width || system.seed.height() != height {
        return Err(AssemblyError::SeedShape {
            seed_width: system.seed.width(),
            seed_height: system.seed.height(),
            width,
            height,
        });
    }
    Ok(())
}

struct Grower<'a> {
    system: &'a TileSystem,
    width: usize,
    height: usize,
    sites: Vec<Option<usize>>,
    by_inputs: Option<HashMap<(Glue, Glue), usize>>,
}

impl Grower<'_> {
    /// Glue facing `(x, y)` from the neighbour in direction `dir`, if placed.
    fn facing(&self, x: usize, y: usize, dir: Direction) -> Option<Glue> {
        let (nx, ny) = match dir {
            Direction::North => (x, y + 1),
            Direction::East => (x + 1, y),
            Direction::South => (x, y - 1),
            Direction::West => (x - 1, y),
        };
        if nx > self.width || ny > self.height {
            return None;
        }
        if ny == 0 {
            return (nx >= 1).then(|| self.system.seed.south_row[nx - 1]);
        }
        if nx == 0 {
            return Some(self.system.seed.west_column[ny - 1]);
        }
        self.sites[(ny - 1) * self.width + (nx - 1)]
            .map(|t| self.system.tiles[t].glue(dir.opposite()))
    }

    /// The tile that can attach at an empty site.
    fn attachable(&self, x: usize, y: usize) -> Option<usize> {
        if let Some(map) = &self.by_inputs {
            let s = self.facing(x, y, Direction::South)?;
            let w = self.facing(x, y, Direction::West)?;
            return map.get(&(s, w)).copied();
        }
        let facing = Direction::ALL.map(|d| self.facing(x, y, d));
        self.system.tiles.iter().position(|tile| {
            let bond: u32 = Direction::ALL
                .iter()
                .zip(facing.iter())
                .filter_map(|(&d, g)| g.map(|g| self.system.strength.strength(tile.glue(d), g)))
                .sum();
            bond >= TEMPERATURE
        })
    }
}

fn grow(
    system: &TileSystem,
    width: usize,
    height: usize,
    rng: Option<&mut dyn RngCore>,
) -> Result<Assembly, AssemblyError> {
    check_seed(system, width, height)?;
    let by_inputs = system.strength.is_uniform().then(|| {
        system
            .tiles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.inputs(), i))
            .collect()
    });
    let mut g = Grower {
        system,
        width,
        height,
        sites: vec![None; width * height],
        by_inputs,
    };
    match rng {
        None => loop {
            let mut placed = false;
            for y in 1..=height {
                for x in 1..=width {
                    let idx = (y - 1) * width + (x - 1);
                    if g.sites[idx].is_none() {
                        if let Some(t) = g.attachable(x, y) {
                            g.sites[idx] = Some(t);
                            placed = true;
                        }
                    }
                }
            }
            if !placed {
                break;
            }
        },
        Some(rng) => loop {
            let mut frontier = Vec::new();
            for y in 1..=height {
                for x in 1..=width {
                    if g.sites[(y - 1) * width + (x - 1)].is_none() {
                        if let Some(t) = g.attachable(x, y) {
                            frontier.push((x, y, t));
                        }
                    }
                }
            }
            let Some(&(x, y, t)) = frontier.choose(rng) else {
                break;
            };
            g.sites[(y - 1) * width + (x - 1)] = Some(t);
        },
    }
    if let Some((x, y)) = (1..=width)
        .flat_map(|x| (1..=height).map(move |y| (x, y)))
        .find(|&(x, y)| g.sites[(y - 1) * width + (x - 1)].is_none())
    {
        return Err(AssemblyError::Stuck(x, y));
    }
    Ok(Assembly {
        width,
        height,
        sites: g.sites,
    })
}

/// Checks the three solution properties against `pattern`.
///
/// Deterministic systems are assembled directly. For other systems every
/// site collects the set of tiles that some terminal assembly could place
/// there, with the south and west inputs treated independently. That set
/// over-approximates the reachable tiles, so an `Ok` verdict is sound but a
/// rare nondeterministic solution may be rejected.
pub fn verify_solution(system: &TileSystem, pattern: &Pattern) -> Verdict {
    for (i, tile) in system.tiles.iter().enumerate() {
        for g in tile.glues() {
            let s = system.strength.strength(g, g);
            if s != 1 {
                return Verdict::P1 {
                    tile: i,
                    glue: g,
                    strength: s,
                };
            }
        }
    }
    let (width, height) = (pattern.width(), pattern.height());
    if let Err(AssemblyError::SeedShape {
        seed_width,
        seed_height,
        ..
    }) = check_seed(system, width, height)
    {
        return Verdict::P2 {
            x: 0,
            y: 0,
            reason: format!("seed spans {seed_width}x{seed_height}, pattern is {width}x{height}"),
        };
    }
    if !is_deterministic(&system.tiles) {
        return verify_by_sets(system, pattern);
    }
    let assembly = match grow(system, width, height, None) {
        Ok(a) => a,
        Err(AssemblyError::Stuck(x, y)) => {
            return Verdict::P2 {
                x,
                y,
                reason: "no tile attaches".into(),
            }
        }
        Err(e) => unreachable!("checked above: {e}"),
    };
    for x in 1..=width {
        for y in 1..=height {
            let t = assembly.tile_at(x, y).expect("complete assembly");
            let found = system.tiles[t].colour;
            let expected = pattern.colour(x, y);
            if found != expected {
                return Verdict::P3 {
                    x,
                    y,
                    expected,
                    found,
                };
            }
        }
    }
    Verdict::Ok
}

fn verify_by_sets(system: &TileSystem, pattern: &Pattern) -> Verdict {
    let (width, height) = (pattern.width(), pattern.height());
    let mut by_inputs: HashMap<(Glue, Glue), Vec<usize>> = HashMap::new();
    for (i, t) in system.tiles.iter().enumerate() {
        by_inputs.entry(t.inputs()).or_default().push(i);
    }
    // possible north and east glues exposed by each site
    let mut north: Vec<Vec<Glue>> = vec![Vec::new(); width * height];
    let mut east: Vec<Vec<Glue>> = vec![Vec::new(); width * height];
    let mut failure: Option<((usize, usize), Verdict)> = None;
    let mut report = |x: usize, y: usize, v: Verdict| {
        if failure.as_ref().is_none_or(|(at, _)| (x, y) < *at) {
            failure = Some(((x, y), v));
        }
    };
    for y in 1..=height {
        for x in 1..=width {
            let south = if y == 1 {
                vec![system.seed.south_row[x - 1]]
            } else {
                north[(y - 2) * width + (x - 1)].clone()
            };
            let west = if x == 1 {
                vec![system.seed.west_column[y - 1]]
            } else {
                east[(y - 1) * width + (x - 2)].clone()
            };
            let idx = (y - 1) * width + (x - 1);
            for &s in &south {
                for &w in &west {
                    let Some(tiles) = by_inputs.get(&(s, w)) else {
                        report(x, y, Verdict::P2 {
                            x,
                            y,
                            reason: "no tile attaches".into(),
                        });
                        continue;
                    };
                    for &t in tiles {
                        let tile = &system.tiles[t];
                        let expected = pattern.colour(x, y);
                        if tile.colour != expected {
                            report(x, y, Verdict::P3 {
                                x,
                                y,
                                expected,
                                found: tile.colour,
                            });
                        }
                        north[idx].push(tile.north);
                        east[idx].push(tile.east);
                    }
                }
            }
            north[idx].sort_unstable();
            north[idx].dedup();
            east[idx].sort_unstable();
            east[idx].dedup();
        }
    }
    failure.map_or(Verdict::Ok, |(_, v)| v)
}

/// Seed whose exposed glues let a glue-consistent assignment fall into place:
/// north glues of the seed row match the south glues of row 1, east glues of
/// the seed column match the west glues of column 1.
pub fn derive_seed(
    width: usize,
    height: usize,
    assignment: &[GlueTuple],
) -> Result<SeedAssembly, AssemblyError> {
    assert_eq!(assignment.len(), width * height, "one tile per cell");
    let at = |x: usize, y: usize| assignment[(y - 1) * width + (x - 1)];
    for y in 1..=height {
        for x in 1..=width {
            let t = at(x, y);
            if x < width && t[Direction::East as usize] != at(x + 1, y)[Direction::West as usize] {
                return Err(AssemblyError::InconsistentAssignment(x, y, x + 1, y));
            }
            if y < height && t[Direction::North as usize] != at(x, y + 1)[Direction::South as usize]
            {
                return Err(AssemblyError::InconsistentAssignment(x, y, x, y + 1));
            }
        }
    }
    Ok(SeedAssembly {
        south_row: (1..=width)
            .map(|x| at(x, 1)[Direction::South as usize])
            .collect(),
        west_column: (1..=height)
            .map(|y| at(1, y)[Direction::West as usize])
            .collect(),
    })
}

impl TileSystem {
    /// The system realising a per-cell tile assignment: its distinct tiles,
    /// sorted by `(south, west)`, and the derived seed.
    pub fn from_cell_tiles(
        width: usize,
        height: usize,
        cells: &[TileType],
    ) -> Result<Self, AssemblyError> {
        let glues: Vec<GlueTuple> = cells.iter().map(TileType::glues).collect();
        let seed = derive_seed(width, height, &glues)?;
        let mut tiles = cells.to_vec();
        tiles.sort_by_key(|t| (t.south, t.west, t.north, t.east, t.colour));
        tiles.dedup();
        Ok(Self {
            tiles,
            seed,
            strength: GlueStrength::default(),
        })
    }

    /// The system read off a constructible MGTA, coloured by `pattern`.
    pub fn from_mgta(state: &MgtaState, pattern: &Pattern) -> Result<Self, AssemblyError> {
        let canon = state.canonical_glues();
        let cells: Vec<TileType> = (0..pattern.len())
            .map(|cell| {
                let class = canon.class_of[cell] as usize;
                TileType::new(
                    canon.tiles[class],
                    pattern.colour_at(canon.classes[class] as usize),
                )
            })
            .collect();
        Self::from_cell_tiles(pattern.width(), pattern.height(), &cells)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Writes the tile-system file format. Tiles are listed sorted by
    /// `(south, west)` and numbered in that order.
    pub fn to_text(&self) -> String {
        let mut tiles = self.tiles.clone();
        tiles.sort_by_key(|t| (t.south, t.west, t.north, t.east, t.colour));
        let mut glues: Vec<Glue> = tiles
            .iter()
            .flat_map(|t| t.glues())
            .chain(self.seed.south_row.iter().copied())
            .chain(self.seed.west_column.iter().copied())
            .collect();
        glues.sort_unstable();
        glues.dedup();
        let colours = tiles.iter().map(|t| t.colour as usize + 1).max().unwrap_or(0);
        let mut out = format!("tiles {} glues {} colours {}\n", tiles.len(), glues.len(), colours);
        for (i, t) in tiles.iter().enumerate() {
            writeln!(
                out,
                "{i} {} {} {} {} {}",
                t.north, t.east, t.south, t.west, t.colour
            )
            .unwrap();
        }
        out.push_str("seed\n0 0 - -\n");
        for (x, g) in self.seed.south_row.iter().enumerate() {
            writeln!(out, "{} 0 {g} -", x + 1).unwrap();
        }
        for (y, g) in self.seed.west_column.iter().enumerate() {
            writeln!(out, "0 {} - {g}", y + 1).unwrap();
        }
        out
    }

    /// Reads the tile-system file format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: String| ParseError::Line { line, message };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| ParseError::Header("missing header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "tiles" || h[2] != "glues" || h[4] != "colours" {
            return Err(err(hl, "expected `tiles t glues g colours k`".into()));
        }
        let num = |line: usize, s: &str| -> Result<u64, ParseError> {
            s.parse::<u64>()
                .map_err(|_| err(line, format!("not a non-negative integer: `{s}`")))
        };
        let (count, glue_count, colours) =
            (num(hl, h[1])? as usize, num(hl, h[3])? as usize, num(hl, h[5])?);
        let mut tiles = Vec::with_capacity(count);
        let mut ids = std::collections::HashSet::new();
        for _ in 0..count {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| err(hl, format!("expected {count} tile lines")))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(err(ln, "expected `id n e s w colour`".into()));
            }
            if !ids.insert(num(ln, f[0])?) {
                return Err(err(ln, format!("duplicate tile id {}", f[0])));
            }
            let colour = num(ln, f[5])?;
            if colour >= colours {
                return Err(err(ln, format!("colour {colour} not below {colours}")));
            }
            let g = |s: &str| num(ln, s).map(|v| v as Glue);
            tiles.push(TileType {
                north: g(f[1])?,
                east: g(f[2])?,
                south: g(f[3])?,
                west: g(f[4])?,
                colour: colour as Colour,
            });
        }
        match lines.next() {
            Some((_, "seed")) => {}
            Some((ln, _)) => return Err(err(ln, "expected `seed`".into())),
            None => return Err(err(hl, "missing seed section".into())),
        }
        let mut south: BTreeMap<usize, Glue> = BTreeMap::new();
        let mut west: BTreeMap<usize, Glue> = BTreeMap::new();
        let mut corner = false;
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(err(ln, "expected `x y glue_n glue_e`".into()));
            }
            let (x, y) = (num(ln, f[0])? as usize, num(ln, f[1])? as usize);
            let glue = |s: &str| -> Result<Option<Glue>, ParseError> {
                if s == "-" {
                    Ok(None)
                } else {
                    num(ln, s).map(|v| Some(v as Glue))
                }
            };
            let (n, e) = (glue(f[2])?, glue(f[3])?);
            let fresh = match (x, y) {
                (0, 0) => !std::mem::replace(&mut corner, true),
                (x, 0) => south
                    .insert(x, n.ok_or_else(|| err(ln, "seed row cell needs a north glue".into()))?)
                    .is_none(),
                (0, y) => west
                    .insert(y, e.ok_or_else(|| err(ln, "seed column cell needs an east glue".into()))?)
                    .is_none(),
                _ => return Err(err(ln, format!("({x}, {y}) is not on the seed L"))),
            };
            if !fresh {
                return Err(err(ln, format!("seed cell ({x}, {y}) listed twice")));
            }
        }
        let contiguous = |m: &BTreeMap<usize, Glue>| m.keys().copied().eq(1..=m.len());
        if !corner || south.is_empty() || west.is_empty() || !contiguous(&south) || !contiguous(&west)
        {
            return Err(ParseError::Header(
                "seed must list (0,0), (1..m, 0) and (0, 1..n)".into(),
            ));
        }
        let system = TileSystem {
            tiles,
            seed: SeedAssembly {
                south_row: south.into_values().collect(),
                west_column: west.into_values().collect(),
            },
            strength: GlueStrength::default(),
        };
        let mut distinct: Vec<Glue> = system
            .tiles
            .iter()
            .flat_map(|t| t.glues())
            .chain(system.seed.south_row.iter().copied())
            .chain(system.seed.west_column.iter().copied())
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > glue_count {
            return Err(err(
                hl,
                format!("{} distinct glues used, header declares {glue_count}", distinct.len()),
            ));
        }
        Ok(system)
    }
}

/// Reference systems for the two classic patterns.
pub mod library {
    use super::*;

    /// Four XOR tiles; reproduces [`crate::pattern::sierpinski`].
    pub fn sierpinski_system(width: usize, height: usize) -> TileSystem {
        let tiles = (0..2)
            .flat_map(|s| (0..2).map(move |w| (s, w)))
            .map(|(s, w)| {
                let v = s ^ w;
                TileType {
                    north: v,
                    east: v,
                    south: s,
                    west: w,
                    colour: v as Colour,
                }
            })
            .collect();
        TileSystem {
            tiles,
            seed: SeedAssembly {
                south_row: (1..=width).map(|x| Glue::from(x == 1)).collect(),
                west_column: vec![0; height],
            },
            strength: GlueStrength::default(),
        }
    }

    /// The four rule tiles of the binary counter, with the boundary rows of
    /// the classic seven-tile system folded into the seed. North/south glues
    /// carry a bit (0, 1); east/west glues carry a carry (2 = none, 3 = one).
    pub fn binary_counter_system(width: usize, height: usize) -> TileSystem {
        let tiles = (0..2)
            .flat_map(|b| (0..2).map(move |c| (b, c)))
            .map(|(b, c)| TileType {
                north: b ^ c,
                east: 2 + (b & c),
                south: b,
                west: 2 + c,
                colour: (b ^ c) as Colour,
            })
            .collect();
        TileSystem {
            tiles,
            seed: SeedAssembly {
                south_row: vec![0; width],
                west_column: (1..=height).map(|y| if y == 1 { 2 } else { 3 }).collect(),
            },
            strength: GlueStrength::default(),
        }
    }
}
