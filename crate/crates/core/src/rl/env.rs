use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    fn perpendicular(self) -> [Action; 2] {
        match self {
            Action::Up | Action::Down => [Action::Left, Action::Right],
            Action::Left | Action::Right => [Action::Up, Action::Down],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: usize,
    pub reward: f64,
    pub done: bool,
}

/// Frozen-Lake style grid. Cells are numbered row-major from the top-left.
/// Reaching the goal pays 1, everything else pays 0; an episode ends on a
/// hole, the goal, or the step limit. Moves into a wall leave the agent in
/// place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEnv {
    pub width: usize,
    pub height: usize,
    pub start: usize,
    pub goal: usize,
    pub holes: Vec<usize>,
    pub step_limit: usize,
    /// Intended move with probability 1/3, each perpendicular move 1/3.
    pub slippery: bool,
    #[serde(skip)]
    pos: usize,
    #[serde(skip)]
    steps: usize,
    #[serde(skip)]
    done: bool,
}

impl GridEnv {
    pub fn new(
        width: usize,
        height: usize,
        start: usize,
        goal: usize,
        holes: Vec<usize>,
        step_limit: usize,
    ) -> Result<Self> {
        let n = width * height;
        if n == 0 || step_limit == 0 {
            return Err(Error::Config(
                "grid and step limit must be non-empty".into(),
            ));
        }
        let mut cells = vec![start, goal];
        cells.extend(&holes);
        for (i, &c) in cells.iter().enumerate() {
            if c >= n {
                return Err(Error::Config(format!(
                    "cell {c} outside {width}x{height} grid"
                )));
            }
            if cells[..i].contains(&c) {
                return Err(Error::Config(format!("cell {c} used twice")));
            }
        }
        Ok(GridEnv {
            width,
            height,
            start,
            goal,
            holes,
            step_limit,
            slippery: false,
            pos: start,
            steps: 0,
            done: false,
        })
    }

    /// Parses rows of `S` (start), `G` (goal), `H` (hole) and `F` (frozen).
    pub fn from_map(rows: &[&str], step_limit: usize) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let (mut start, mut goal, mut holes) = (None, None, Vec::new());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Config(format!(
                    "map row {r} has length {}",
                    row.len()
                )));
            }
            for (c, ch) in row.chars().enumerate() {
                let cell = r * width + c;
                match ch {
                    'S' => start = Some(cell),
                    'G' => goal = Some(cell),
                    'H' => holes.push(cell),
                    'F' => {}
                    other => return Err(Error::Config(format!("unknown map tile {other:?}"))),
                }
            }
        }
        match (start, goal) {
            (Some(s), Some(g)) => Self::new(width, height, s, g, holes, step_limit),
            _ => Err(Error::Config("map needs one S and one G".into())),
        }
    }

    /// The canonical 4x4 lake.
    pub fn frozen_lake_4x4() -> Self {
        Self::from_map(&["SFFF", "FHFH", "FFFH", "HFFG"], 20).expect("valid map")
    }

    pub fn n_states(&self) -> usize {
        self.width * self.height
    }

    pub fn state(&self) -> usize {
        self.pos
    }

    pub fn is_terminal(&self, cell: usize) -> bool {
        cell == self.goal || self.holes.contains(&cell)
    }

    pub fn reset(&mut self) -> usize {
        self.pos = self.start;
        self.steps = 0;
        self.done = false;
        self.pos
    }

    /// Deterministic successor of `cell` under `action`.
    pub fn successor(&self, cell: usize, action: Action) -> usize {
        let (r, c) = (cell / self.width, cell % self.width);
        let (r, c) = match action {
            Action::Up => (r.saturating_sub(1), c),
            Action::Down => ((r + 1).min(self.height - 1), c),
            Action::Left => (r, c.saturating_sub(1)),
            Action::Right => (r, (c + 1).min(self.width - 1)),
        };
        r * self.width + c
    }

    pub fn step(&mut self, action: Action, rng: &mut SimRng) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::Config("step called on a finished episode".into()));
        }
        let actual = if self.slippery {
            match rng.gen_range(0..3) {
                0 => action,
                k => action.perpendicular()[k - 1],
            }
        } else {
            action
        };
        self.pos = self.successor(self.pos, actual);
        self.steps += 1;
        let reward = if self.pos == self.goal { 1.0 } else { 0.0 };
        self.done = self.is_terminal(self.pos) || self.steps >= self.step_limit;
        Ok(StepOutcome {
            state: self.pos,
            reward,
            done: self.done,
        })
    }
}
