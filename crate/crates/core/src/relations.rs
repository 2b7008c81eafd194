//! Relation groups acting on the 24 triads.
//!
//! Two interchangeable systems connect any ordered pair of chords by exactly
//! one relation (the action is simply transitive):
//!
//! * the triad circle, where chords are ordered by stacking thirds (the third
//!   and fifth of a chord become the root and third of the next) and a
//!   relation is a clockwise step count in -11..=12;
//! * the Neo-Riemannian Tonnetz, where relations are elements of the group
//!   generated by the P (parallel), L (leading-tone exchange) and R (relative)
//!   transformations.
//!
//! All 24x24 tables are precomputed at construction; the per-pair operations
//! are table lookups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chord::{Chord, Mode};
use crate::error::Error;

const GROUP_ORDER: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    TriadCircle,
    Tonnetz,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemKind::TriadCircle => f.write_str("triad_circle"),
            SystemKind::Tonnetz => f.write_str("tonnetz"),
        }
    }
}

/// One element of a relation group. Values from different systems never
/// compare equal and cannot be mixed in one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Relation {
    system: SystemKind,
    id: u8,
}

impl Relation {
    pub fn system(self) -> SystemKind {
        self.system
    }

    /// Clockwise step count in -11..=12 for triad-circle relations.
    pub fn circle_step(self) -> Option<i8> {
        match self.system {
            SystemKind::TriadCircle => Some(signed_step(self.id)),
            SystemKind::Tonnetz => None,
        }
    }
}

fn signed_step(id: u8) -> i8 {
    if id <= 12 {
        id as i8
    } else {
        id as i8 - 24
    }
}

/// A relation group together with its precomputed action, relation and
/// composition tables. Immutable after construction.
pub struct RelationSystem {
    kind: SystemKind,
    /// action[f][a] = index of f.a
    action: Vec<[u8; GROUP_ORDER]>,
    /// between[a][b] = the unique f with f.a = b
    between: Vec<[u8; GROUP_ORDER]>,
    /// compose[f][g] = f after g
    compose: Vec<[u8; GROUP_ORDER]>,
    identity: u8,
    /// canonical PLR words, tonnetz only
    words: Vec<String>,
}

impl RelationSystem {
    pub fn new(kind: SystemKind) -> Self {
        match kind {
            SystemKind::TriadCircle => Self::triad_circle(),
            SystemKind::Tonnetz => Self::tonnetz(),
        }
    }

    pub fn triad_circle() -> Self {
        let order = circle_order();
        let mut position = [0u8; GROUP_ORDER];
        for (pos, chord) in order.iter().enumerate() {
            position[chord.index() as usize] = pos as u8;
        }
        let mut action = vec![[0u8; GROUP_ORDER]; GROUP_ORDER];
        let mut between = vec![[0u8; GROUP_ORDER]; GROUP_ORDER];
        let mut compose = vec![[0u8; GROUP_ORDER]; GROUP_ORDER];
        for f in 0..GROUP_ORDER {
            for a in 0..GROUP_ORDER {
                let pos = (position[a] as usize + f) % GROUP_ORDER;
                action[f][a] = order[pos].index();
                compose[f][a] = ((f + a) % GROUP_ORDER) as u8;
            }
        }
        for a in 0..GROUP_ORDER {
            for b in 0..GROUP_ORDER {
                let step = (GROUP_ORDER + position[b] as usize - position[a] as usize)
                    % GROUP_ORDER;
                between[a][b] = step as u8;
            }
        }
        RelationSystem {
            kind: SystemKind::TriadCircle,
            action,
            between,
            compose,
            identity: 0,
            words: Vec::new(),
        }
    }

    pub fn tonnetz() -> Self {
        let generators = [('P', plr_perm('P')), ('L', plr_perm('L')), ('R', plr_perm('R'))];
        // Breadth-first search over words, shortest first and within a length
        // in lexicographic order with P < L < R, so the first word reaching an
        // element is its canonical word.
        let identity_perm: [u8; GROUP_ORDER] = std::array::from_fn(|i| i as u8);
        let mut perms: Vec<[u8; GROUP_ORDER]> = vec![identity_perm];
        let mut words: Vec<String> = vec![String::new()];
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &idx in &frontier {
                let base = perms[idx];
                let word = words[idx].clone();
                for (letter, gen) in &generators {
                    // the new letter acts after the existing word
                    let composed: [u8; GROUP_ORDER] =
                        std::array::from_fn(|i| gen[base[i] as usize]);
                    if !perms.contains(&composed) {
                        perms.push(composed);
                        words.push(format!("{word}{letter}"));
                        next.push(perms.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(perms.len(), GROUP_ORDER, "PLR group must have 24 elements");

        // Identify each element by the image of C major (index 0); valid
        // because the action is simply transitive.
        let mut by_id: Vec<Option<usize>> = vec![None; GROUP_ORDER];
        for (i, perm) in perms.iter().enumerate() {
            let id = perm[0] as usize;
            assert!(by_id[id].is_none(), "action on C major must be free");
            by_id[id] = Some(i);
        }
        let element =
            |id: usize| -> &[u8; GROUP_ORDER] { &perms[by_id[id].expect("complete orbit")] };

        let mut action = vec![[0u8; GROUP_ORDER]; GROUP_ORDER];
        let mut sorted_words = vec![String::new(); GROUP_ORDER];
        for id in 0..GROUP_ORDER {
            action[id] = *element(id);
            sorted_words[id] = words[by_id[id].unwrap()].clone();
        }
        let mut between = vec![[0u8; GROUP_ORDER]; GROUP_ORDER];
        for a in 0..GROUP_ORDER {
            let mut seen = [false; GROUP_ORDER];
            for (f, table) in action.iter().enumerate() {
                let b = table[a] as usize;
                assert!(!seen[b], "action must be simply transitive");
                seen[b] = true;
                between[a][b] = f as u8;
            }
        }
        let mut compose = vec![[0u8; GROUP_ORDER]; GROUP_ORDER];
        for f in 0..GROUP_ORDER {
            for g in 0..GROUP_ORDER {
                let composed: [u8; GROUP_ORDER] =
                    std::array::from_fn(|i| action[f][action[g][i] as usize]);
                let id = composed[0] as usize;
                debug_assert_eq!(action[id], composed, "group must be closed");
                compose[f][g] = id as u8;
            }
        }
        let identity = between[0][0];
        RelationSystem {
            kind: SystemKind::Tonnetz,
            action,
            between,
            compose,
            identity,
            words: sorted_words,
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn identity(&self) -> Relation {
        Relation {
            system: self.kind,
            id: self.identity,
        }
    }

    /// All 24 relations of the group.
    pub fn relations(&self) -> impl Iterator<Item = Relation> + '_ {
        (0..GROUP_ORDER as u8).map(|id| Relation {
            system: self.kind,
            id,
        })
    }

    /// The unique relation mapping `a` to `b`.
    pub fn relation_between(&self, a: Chord, b: Chord) -> Relation {
        Relation {
            system: self.kind,
            id: self.between[a.index() as usize][b.index() as usize],
        }
    }

    /// Group action f.a.
    pub fn apply(&self, f: Relation, a: Chord) -> Result<Chord, Error> {
        self.check(f)?;
        Ok(Chord::from_index(self.action[f.id as usize][a.index() as usize]))
    }

    /// Composition `f` after `g`: apply `g` first, then `f`. This convention
    /// is fixed everywhere; the tonnetz group is non-commutative.
    pub fn compose(&self, f: Relation, g: Relation) -> Result<Relation, Error> {
        self.check(f)?;
        self.check(g)?;
        Ok(Relation {
            system: self.kind,
            id: self.compose[f.id as usize][g.id as usize],
        })
    }

    /// True iff `f` fixes every chord.
    pub fn is_identity(&self, f: Relation) -> bool {
        f.system == self.kind && f.id == self.identity
    }

    /// Triad-circle relation from a clockwise step count (any integer).
    pub fn step_relation(&self, steps: i32) -> Result<Relation, Error> {
        if self.kind != SystemKind::TriadCircle {
            return Err(Error::SystemMismatch {
                expected: SystemKind::TriadCircle,
                found: self.kind,
            });
        }
        Ok(Relation {
            system: self.kind,
            id: steps.rem_euclid(GROUP_ORDER as i32) as u8,
        })
    }

    /// Report rendering: signed step count for the circle, canonical PLR word
    /// for the tonnetz ("" is the identity).
    pub fn render(&self, f: Relation) -> String {
        match self.kind {
            SystemKind::TriadCircle => signed_step(f.id).to_string(),
            SystemKind::Tonnetz => self.words[f.id as usize].clone(),
        }
    }

    /// Full action table of `f`, indexed by chord index.
    pub fn action_table(&self, f: Relation) -> [u8; GROUP_ORDER] {
        self.action[f.id as usize]
    }

    fn check(&self, f: Relation) -> Result<(), Error> {
        if f.system == self.kind {
            Ok(())
        } else {
            Err(Error::SystemMismatch {
                expected: self.kind,
                found: f.system,
            })
        }
    }

    #[inline]
    pub(crate) fn between_idx(&self, a: u8, b: u8) -> u8 {
        self.between[a as usize][b as usize]
    }
}

/// The triad circle from C major: the third and fifth of each chord become
/// the root and third of the next, so majors step to the minor a major third
/// up and minors to the major a minor third up.
fn circle_order() -> [Chord; GROUP_ORDER] {
    let mut cur = Chord::new(0, Mode::Major);
    let order = std::array::from_fn(|_| {
        let here = cur;
        cur = match here.mode() {
            Mode::Major => Chord::new(here.pitch_class() + 4, Mode::Minor),
            Mode::Minor => Chord::new(here.pitch_class() + 3, Mode::Major),
        };
        here
    });
    debug_assert_eq!(cur, order[0], "triad circle must close after 24 steps");
    order
}

fn plr_perm(letter: char) -> [u8; GROUP_ORDER] {
    std::array::from_fn(|i| {
        let chord = Chord::from_index(i as u8);
        let pc = chord.pitch_class();
        let mapped = match (letter, chord.mode()) {
            ('P', Mode::Major) => Chord::new(pc, Mode::Minor),
            ('P', Mode::Minor) => Chord::new(pc, Mode::Major),
            ('L', Mode::Major) => Chord::new(pc + 4, Mode::Minor),
            ('L', Mode::Minor) => Chord::new(pc + 8, Mode::Major),
            ('R', Mode::Major) => Chord::new(pc + 9, Mode::Minor),
            ('R', Mode::Minor) => Chord::new(pc + 3, Mode::Major),
            _ => unreachable!("unknown generator"),
        };
        mapped.index()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::{parse_chord_label, ChordToken};

    fn chord(label: &str) -> Chord {
        match parse_chord_label(label).unwrap() {
            ChordToken::Chord(c) => c,
            ChordToken::Silence => panic!("silence"),
        }
    }

    #[test]
    fn circle_steps_match_the_stacking_rule() {
        let sys = RelationSystem::triad_circle();
        assert_eq!(sys.relation_between(chord("C"), chord("C")).circle_step(), Some(0));
        assert_eq!(sys.relation_between(chord("C"), chord("Em")).circle_step(), Some(1));
        assert_eq!(sys.relation_between(chord("C"), chord("G")).circle_step(), Some(2));
        assert_eq!(sys.relation_between(chord("C"), chord("F")).circle_step(), Some(-2));
        assert_eq!(sys.relation_between(chord("C"), chord("Am")).circle_step(), Some(-1));
    }

    #[test]
    fn circle_apply_and_compose() {
        let sys = RelationSystem::triad_circle();
        let two = sys.step_relation(2).unwrap();
        assert_eq!(sys.apply(two, chord("C")).unwrap(), chord("G"));
        let minus_one = sys.step_relation(23).unwrap();
        let composed = sys.compose(two, minus_one).unwrap();
        assert_eq!(composed.circle_step(), Some(1));
        for f in sys.relations() {
            assert_eq!(sys.compose(f, sys.identity()).unwrap(), f);
            assert_eq!(sys.compose(sys.identity(), f).unwrap(), f);
        }
    }

    #[test]
    fn circle_identity_checks() {
        let sys = RelationSystem::triad_circle();
        assert!(sys.is_identity(sys.step_relation(0).unwrap()));
        assert!(!sys.is_identity(sys.step_relation(12).unwrap()));
    }

    #[test]
    fn tonnetz_generators_act_as_defined() {
        let sys = RelationSystem::tonnetz();
        let p = sys.relation_between(chord("C"), chord("Cm"));
        let l = sys.relation_between(chord("C"), chord("Em"));
        let r = sys.relation_between(chord("C"), chord("Am"));
        assert_eq!(sys.render(p), "P");
        assert_eq!(sys.render(l), "L");
        assert_eq!(sys.render(r), "R");
        assert_eq!(sys.apply(r, chord("C")).unwrap(), chord("Am"));
        assert!(!sys.is_identity(l));
        // canonical words read in application order: L then R lands on G
        assert_eq!(sys.render(sys.relation_between(chord("C"), chord("G"))), "LR");
        // P, L, R are involutions
        for f in [p, l, r] {
            assert!(sys.is_identity(sys.compose(f, f).unwrap()));
        }
        assert_eq!(sys.render(sys.identity()), "");
    }

    #[test]
    fn both_systems_are_simply_transitive() {
        for sys in [RelationSystem::triad_circle(), RelationSystem::tonnetz()] {
            for a in Chord::all() {
                for b in Chord::all() {
                    let f = sys.relation_between(a, b);
                    assert_eq!(sys.apply(f, a).unwrap(), b);
                }
                assert!(sys.is_identity(sys.relation_between(a, a)));
            }
        }
    }

    #[test]
    fn tonnetz_relation_equality_is_action_table_equality() {
        let sys = RelationSystem::tonnetz();
        for f in sys.relations() {
            for g in sys.relations() {
                assert_eq!(f == g, sys.action_table(f) == sys.action_table(g));
            }
        }
    }

    #[test]
    fn system_mismatch_is_rejected() {
        let circle = RelationSystem::triad_circle();
        let tonnetz = RelationSystem::tonnetz();
        let f = tonnetz.relation_between(chord("C"), chord("Am"));
        assert!(matches!(
            circle.apply(f, chord("C")),
            Err(Error::SystemMismatch { .. })
        ));
        assert!(matches!(
            circle.compose(f, f),
            Err(Error::SystemMismatch { .. })
        ));
        assert!(!circle.is_identity(tonnetz.identity()));
    }

    #[test]
    fn alternating_l_and_r_reproduces_the_triad_circle() {
        let circle = RelationSystem::triad_circle();
        let tonnetz = RelationSystem::tonnetz();
        let l = tonnetz.relation_between(chord("C"), chord("Em"));
        let r = tonnetz.relation_between(chord("C"), chord("Am"));
        let mut cur = chord("C");
        let one = circle.step_relation(1).unwrap();
        let mut expect = chord("C");
        for step in 0..24 {
            assert_eq!(cur, expect, "diverged after {step} steps");
            let gen = if step % 2 == 0 { l } else { r };
            cur = tonnetz.apply(gen, cur).unwrap();
            expect = circle.apply(one, expect).unwrap();
        }
        assert_eq!(cur, chord("C"));
    }
}
