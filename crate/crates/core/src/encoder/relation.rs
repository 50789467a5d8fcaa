//! Per-gate transition relations over the local Boolean variables of one
//! time step, and their CNF.
//!
//! A Pauli letter on a qubit is the bit pair `(x, z)`: `I = 00`, `X = 10`,
//! `Z = 01`, `Y = 11`; the sign is `(-1)^r`. Each gate maps an input
//! `(x, z, r)` frame to one or two output frames. When a gate splits a letter
//! into two summands, branch variables select the summand and carry its
//! coefficient as a literal weight.

use std::sync::OnceLock;

use crate::circuit::GateKind;

/// Branch variable of a non-Clifford step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchVar {
    /// T gate: weight `1/sqrt(2)` when true.
    U,
    /// Rotation, `cos(theta)` summand.
    U1,
    /// Rotation, `sin(theta)` summand.
    U2,
}

/// Role of one local variable of a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    InX(usize),
    InZ(usize),
    InR,
    OutX(usize),
    OutZ(usize),
    OutR,
    Branch(BranchVar),
}

/// Letters and sign of the qubits a gate touches (1 or 2 of them; for CX
/// index 0 is the control).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Frame {
    pub x: [bool; 2],
    pub z: [bool; 2],
    pub r: bool,
}

impl Frame {
    /// All frames over `arity` qubits, in a fixed order.
    pub fn all(arity: usize) -> Vec<Frame> {
        (0..1u32 << (2 * arity + 1))
            .map(|bits| {
                let mut f = Frame::default();
                for q in 0..arity {
                    f.x[q] = bits >> (2 * q) & 1 == 1;
                    f.z[q] = bits >> (2 * q + 1) & 1 == 1;
                }
                f.r = bits >> (2 * arity) & 1 == 1;
                f
            })
            .collect()
    }
}

/// Which summand a transition takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    Plain,
    T,
    Cos,
    Sin,
}

/// Output frames of a core gate for one input frame.
fn transitions(kind: GateKind, f: Frame) -> Vec<(Frame, Tag)> {
    let (x, z, r) = (f.x[0], f.z[0], f.r);
    let one = |x0: bool, z0: bool, r: bool| {
        let mut o = f;
        o.x[0] = x0;
        o.z[0] = z0;
        o.r = r;
        o
    };
    match kind {
        GateKind::H => vec![(one(z, x, r ^ (x & z)), Tag::Plain)],
        GateKind::S => vec![(one(x, x ^ z, r ^ (x & z)), Tag::Plain)],
        GateKind::X => vec![(one(x, z, r ^ z), Tag::Plain)],
        GateKind::Y => vec![(one(x, z, r ^ x ^ z), Tag::Plain)],
        GateKind::Z => vec![(one(x, z, r ^ x), Tag::Plain)],
        GateKind::CX => {
            let (xc, zc, xt, zt) = (f.x[0], f.z[0], f.x[1], f.z[1]);
            let o = Frame {
                x: [xc, xt ^ xc],
                z: [zc ^ zt, zt],
                r: r ^ (xc & zt & !(xt ^ zc)),
            };
            vec![(o, Tag::Plain)]
        }
        GateKind::T | GateKind::RZ => {
            if !x {
                return vec![(f, Tag::Plain)];
            }
            // X -> X, Y ; Y -> Y, -X
            let (keep, flip) = if kind == GateKind::T {
                (Tag::T, Tag::T)
            } else {
                (Tag::Cos, Tag::Sin)
            };
            vec![(f, keep), (one(x, !z, r ^ z), flip)]
        }
        GateKind::RX => {
            if !z {
                return vec![(f, Tag::Plain)];
            }
            // Y -> Y, Z ; Z -> Z, -Y
            vec![(f, Tag::Cos), (one(!x, z, r ^ !x), Tag::Sin)]
        }
        GateKind::RY => {
            if x == z {
                return vec![(f, Tag::Plain)];
            }
            // X -> X, -Z ; Z -> Z, X
            vec![(f, Tag::Cos), (one(z, x, r ^ x), Tag::Sin)]
        }
        GateKind::Sdg | GateKind::Tdg | GateKind::CZ | GateKind::Swap => {
            unreachable!("derived gate {kind:?} has no relation")
        }
    }
}

/// Where an output bit of a relation lives: a fresh local variable or an
/// input variable it always equals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputSource {
    Fresh(usize),
    Reused(Role),
}

/// Admissible assignments of a gate's local variables, and the clauses that
/// exclude everything else.
#[derive(Clone, Debug)]
pub struct GateRelation {
    pub kind: GateKind,
    pub arity: usize,
    /// Local variables; bit `i` of a row is the value of `roles[i]`.
    pub roles: Vec<Role>,
    pub rows: Vec<u32>,
    /// Clauses over local positions: `(index into roles, polarity)`.
    pub clauses: Vec<Vec<(usize, bool)>>,
    out_x: [Option<OutputSource>; 2],
    out_z: [Option<OutputSource>; 2],
    out_r: OutputSource,
}

/// Output bits of one qubit component, indexed like `Frame`.
#[derive(Clone, Copy)]
enum Comp {
    X(usize),
    Z(usize),
    R,
}

fn get(f: &Frame, c: Comp) -> bool {
    match c {
        Comp::X(q) => f.x[q],
        Comp::Z(q) => f.z[q],
        Comp::R => f.r,
    }
}

fn in_role(c: Comp) -> Role {
    match c {
        Comp::X(q) => Role::InX(q),
        Comp::Z(q) => Role::InZ(q),
        Comp::R => Role::InR,
    }
}

impl GateRelation {
    /// Tabulates the relation of a core gate. With `reuse`, an output bit
    /// that always equals some input bit gets no variable of its own.
    pub fn new(kind: GateKind, reuse: bool) -> GateRelation {
        let arity = kind.arity();
        let inputs = Frame::all(arity);
        let triples: Vec<(Frame, Frame, Tag)> = inputs
            .iter()
            .flat_map(|&i| transitions(kind, i).into_iter().map(move |(o, t)| (i, o, t)))
            .collect();

        let mut roles: Vec<Role> = Vec::new();
        let mut in_comps = Vec::new();
        for q in 0..arity {
            in_comps.push(Comp::X(q));
            in_comps.push(Comp::Z(q));
        }
        in_comps.push(Comp::R);
        roles.extend(in_comps.iter().map(|&c| in_role(c)));

        let mut used_sources: Vec<Role> = Vec::new();
        let mut source_for = |out: Comp, roles: &mut Vec<Role>| -> OutputSource {
            if reuse {
                // same position first, then any other input bit
                let candidates = std::iter::once(out).chain(in_comps.iter().copied());
                for src in candidates {
                    let role = in_role(src);
                    if used_sources.contains(&role) {
                        continue;
                    }
                    if triples.iter().all(|(i, o, _)| get(o, out) == get(i, src)) {
                        used_sources.push(role);
                        return OutputSource::Reused(role);
                    }
                }
            }
            roles.push(match out {
                Comp::X(q) => Role::OutX(q),
                Comp::Z(q) => Role::OutZ(q),
                Comp::R => Role::OutR,
            });
            OutputSource::Fresh(roles.len() - 1)
        };

        let mut out_x = [None; 2];
        let mut out_z = [None; 2];
        for q in 0..arity {
            out_x[q] = Some(source_for(Comp::X(q), &mut roles));
            out_z[q] = Some(source_for(Comp::Z(q), &mut roles));
        }
        let out_r = source_for(Comp::R, &mut roles);

        let has = |t: Tag| triples.iter().any(|(_, _, tag)| *tag == t);
        if has(Tag::T) {
            roles.push(Role::Branch(BranchVar::U));
        }
        if has(Tag::Cos) || has(Tag::Sin) {
            roles.push(Role::Branch(BranchVar::U1));
            roles.push(Role::Branch(BranchVar::U2));
        }

        let mut rows: Vec<u32> = triples
            .iter()
            .map(|(i, o, tag)| {
                let mut row = 0u32;
                for (pos, role) in roles.iter().enumerate() {
                    let bit = match *role {
                        Role::InX(q) => i.x[q],
                        Role::InZ(q) => i.z[q],
                        Role::InR => i.r,
                        Role::OutX(q) => o.x[q],
                        Role::OutZ(q) => o.z[q],
                        Role::OutR => o.r,
                        Role::Branch(BranchVar::U) => *tag == Tag::T,
                        Role::Branch(BranchVar::U1) => *tag == Tag::Cos,
                        Role::Branch(BranchVar::U2) => *tag == Tag::Sin,
                    };
                    row |= u32::from(bit) << pos;
                }
                row
            })
            .collect();
        rows.sort_unstable();
        rows.dedup();
        assert_eq!(rows.len(), triples.len(), "{kind:?}: two transitions share a row");

        let clauses = prime_implicates(roles.len(), &rows);
        GateRelation {
            kind,
            arity,
            roles,
            rows,
            clauses,
            out_x,
            out_z,
            out_r,
        }
    }

    /// Number of variables the relation allocates per application.
    pub fn fresh_count(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| !matches!(r, Role::InX(_) | Role::InZ(_) | Role::InR))
            .count()
    }

    pub fn branch_vars(&self) -> Vec<BranchVar> {
        self.roles
            .iter()
            .filter_map(|r| match r {
                Role::Branch(b) => Some(*b),
                _ => None,
            })
            .collect()
    }

    pub fn output_x(&self, q: usize) -> OutputSource {
        self.out_x[q].expect("qubit within arity")
    }

    pub fn output_z(&self, q: usize) -> OutputSource {
        self.out_z[q].expect("qubit within arity")
    }

    pub fn output_r(&self) -> OutputSource {
        self.out_r
    }

    fn position(&self, role: Role) -> usize {
        self.roles.iter().position(|r| *r == role).expect("role present")
    }

    fn read(&self, row: u32, src: OutputSource) -> bool {
        let pos = match src {
            OutputSource::Fresh(p) => p,
            OutputSource::Reused(role) => self.position(role),
        };
        row >> pos & 1 == 1
    }

    /// Admissible outputs for an input frame, read back from the table,
    /// with the set of branch variables that are true.
    pub fn extensions(&self, input: Frame) -> Vec<(Frame, Vec<BranchVar>)> {
        let mut out = Vec::new();
        'rows: for &row in &self.rows {
            for q in 0..self.arity {
                if (row >> self.position(Role::InX(q)) & 1 == 1) != input.x[q]
                    || (row >> self.position(Role::InZ(q)) & 1 == 1) != input.z[q]
                {
                    continue 'rows;
                }
            }
            if (row >> self.position(Role::InR) & 1 == 1) != input.r {
                continue;
            }
            let mut o = Frame::default();
            for q in 0..self.arity {
                o.x[q] = self.read(row, self.output_x(q));
                o.z[q] = self.read(row, self.output_z(q));
            }
            o.r = self.read(row, self.out_r);
            let branches = self
                .branch_vars()
                .into_iter()
                .filter(|b| row >> self.position(Role::Branch(*b)) & 1 == 1)
                .collect();
            out.push((o, branches));
        }
        out
    }
}

/// All prime implicates of the relation whose models are `rows` over `k`
/// variables. A clause is a cube that no admissible row satisfies, negated;
/// cubes are visited by increasing size so only minimal ones are kept.
pub(crate) fn prime_implicates(k: usize, rows: &[u32]) -> Vec<Vec<(usize, bool)>> {
    let full = (1u32 << k) - 1;
    let mut cubes: Vec<(u32, u32)> = Vec::new();
    for mask in 0..=full {
        // enumerate value patterns on `mask`
        let mut vals = 0u32;
        loop {
            cubes.push((mask, vals));
            if vals == mask {
                break;
            }
            vals = (vals.wrapping_sub(mask)) & mask;
        }
    }
    cubes.sort_by_key(|&(mask, vals)| (mask.count_ones(), mask, vals));

    let mut kept: Vec<(u32, u32)> = Vec::new();
    for (mask, vals) in cubes {
        if mask == 0 {
            if rows.is_empty() {
                kept.push((0, 0));
            }
            continue;
        }
        if rows.iter().any(|&r| r & mask == vals) {
            continue;
        }
        if kept.iter().any(|&(km, kv)| km & mask == km && vals & km == kv) {
            continue;
        }
        kept.push((mask, vals));
    }
    kept.into_iter()
        .map(|(mask, vals)| {
            (0..k)
                .filter(|i| mask >> i & 1 == 1)
                // the clause forbids the cube, so each literal is the opposite value
                .map(|i| (i, vals >> i & 1 == 0))
                .collect()
        })
        .collect()
}

const CORE: [GateKind; 10] = [
    GateKind::H,
    GateKind::S,
    GateKind::T,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::CX,
    GateKind::RX,
    GateKind::RY,
    GateKind::RZ,
];

/// Core gate kinds that have a relation.
pub fn core_kinds() -> &'static [GateKind] {
    &CORE
}

/// Shared, lazily built relation for a core gate kind.
pub fn relation(kind: GateKind, reuse: bool) -> &'static GateRelation {
    static REUSE: OnceLock<Vec<GateRelation>> = OnceLock::new();
    static FRESH: OnceLock<Vec<GateRelation>> = OnceLock::new();
    let table = if reuse { &REUSE } else { &FRESH };
    let all = table.get_or_init(|| CORE.iter().map(|&k| GateRelation::new(k, reuse)).collect());
    let idx = CORE
        .iter()
        .position(|&k| k == kind)
        .unwrap_or_else(|| panic!("{kind:?} is not a core gate"));
    &all[idx]
}
