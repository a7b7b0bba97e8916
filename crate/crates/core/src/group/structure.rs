use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::element::{AffineElement, Coords, Element, WreathElement};

/// The arithmetic of a group, independent of any choice of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    /// `Z^D` with optional moduli per coordinate; modulus 0 means `Z`.
    Abelian { moduli: Vec<u64> },
    /// BS(1,q) as `Z[1/q] ⋊ Z`, with `(t1,x1)(t2,x2) = (t1+t2, x1 + q^-t1 x2)`.
    BaumslagSolitar { q: u64 },
    /// `lamp ≀ base` with `(f,h)(f',h') = (f + τ_h f', hh')`, `(τ_h f)(x) = f(h^-1 x)`.
    Wreath {
        lamp: Arc<Structure>,
        base: Arc<Structure>,
    },
}

impl Structure {
    pub fn free_abelian(dimension: usize) -> Self {
        Structure::Abelian {
            moduli: vec![0; dimension],
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            Structure::Abelian { moduli } => Element::Vector(zeros(moduli.len())),
            Structure::BaumslagSolitar { .. } => Element::Affine(AffineElement {
                shift: 0,
                numerator: BigInt::zero(),
                depth: 0,
            }),
            Structure::Wreath { base, .. } => Element::wreath(BTreeMap::new(), base.identity()),
        }
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        match x {
            Element::Vector(coords) => coords.iter().all(|&c| c == 0),
            Element::Affine(a) => a.shift == 0 && a.numerator.is_zero(),
            Element::Wreath(w) => {
                w.lamps.is_empty() && self.base().is_some_and(|b| b.is_identity(&w.base))
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, Structure::Abelian { .. })
    }

    pub fn lamp(&self) -> Option<&Arc<Structure>> {
        match self {
            Structure::Wreath { lamp, .. } => Some(lamp),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<&Arc<Structure>> {
        match self {
            Structure::Wreath { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        let mut product = a.clone();
        self.multiply_assign(&mut product, b);
        product
    }

    /// `a ← a·b`.
    pub fn multiply_assign(&self, a: &mut Element, b: &Element) {
        match (self, a, b) {
            (Structure::Abelian { moduli }, Element::Vector(x), Element::Vector(y)) => {
                for ((xi, &yi), &m) in x.iter_mut().zip(y.iter()).zip(moduli) {
                    *xi = reduce_coordinate(*xi + yi, m);
                }
            }
            (Structure::BaumslagSolitar { q }, Element::Affine(x), Element::Affine(y)) => {
                *x = affine_product(*q, x, y);
            }
            (Structure::Wreath { lamp, base }, Element::Wreath(x), Element::Wreath(y)) => {
                for (position, value) in &y.lamps {
                    let moved = base.multiply(&x.base, position);
                    add_lamp(lamp, &mut x.lamps, moved, value);
                }
                base.multiply_assign(&mut x.base, &y.base);
            }
            (structure, a, b) => {
                panic!("element shapes {a:?} and {b:?} do not match {structure:?}")
            }
        }
    }

    pub fn inverse(&self, x: &Element) -> Element {
        match (self, x) {
            (Structure::Abelian { moduli }, Element::Vector(coords)) => Element::Vector(
                coords
                    .iter()
                    .zip(moduli)
                    .map(|(&c, &m)| reduce_coordinate(-c, m))
                    .collect(),
            ),
            (Structure::BaumslagSolitar { q }, Element::Affine(a)) => {
                let scaled = scale_by_power(*q, &a.numerator, a.depth, a.shift);
                Element::Affine(normalize_affine(*q, -a.shift, -scaled.0, scaled.1))
            }
            (Structure::Wreath { lamp, base }, Element::Wreath(w)) => {
                let base_inverse = base.inverse(&w.base);
                let lamps = w
                    .lamps
                    .iter()
                    .map(|(position, value)| {
                        (base.multiply(&base_inverse, position), lamp.inverse(value))
                    })
                    .collect();
                Element::wreath(lamps, base_inverse)
            }
            (structure, x) => panic!("element {x:?} does not match {structure:?}"),
        }
    }

    /// `x^k` by repeated squaring.
    pub fn power(&self, x: &Element, exponent: i64) -> Element {
        let mut base = if exponent < 0 {
            self.inverse(x)
        } else {
            x.clone()
        };
        let mut remaining = exponent.unsigned_abs();
        let mut result = self.identity();
        while remaining > 0 {
            if remaining & 1 == 1 {
                self.multiply_assign(&mut result, &base);
            }
            remaining >>= 1;
            if remaining > 0 {
                base = self.multiply(&base, &base);
            }
        }
        result
    }

    /// True when `x` has the shape and normal form this structure produces.
    pub fn contains(&self, x: &Element) -> bool {
        match (self, x) {
            (Structure::Abelian { moduli }, Element::Vector(coords)) => {
                coords.len() == moduli.len()
                    && coords
                        .iter()
                        .zip(moduli)
                        .all(|(&c, &m)| m == 0 || (0..m as i64).contains(&c))
            }
            (Structure::BaumslagSolitar { q }, Element::Affine(a)) => {
                *a == normalize_affine(*q, a.shift, a.numerator.clone(), a.depth)
            }
            (Structure::Wreath { lamp, base }, Element::Wreath(w)) => {
                base.contains(&w.base)
                    && w.lamps
                        .iter()
                        .all(|(p, v)| base.contains(p) && lamp.contains(v) && !lamp.is_identity(v))
            }
            _ => false,
        }
    }

    /// Moduli of the abelian quotient returned by [`Structure::abelian_quotient`].
    pub fn abelian_quotient_moduli(&self) -> Vec<u64> {
        match self {
            Structure::Abelian { moduli } => moduli.clone(),
            Structure::BaumslagSolitar { q } if *q > 2 => vec![q - 1, 0],
            Structure::BaumslagSolitar { .. } => vec![0],
            Structure::Wreath { lamp, base } => {
                let mut moduli = lamp.abelian_quotient_moduli();
                moduli.extend(base.abelian_quotient_moduli());
                moduli
            }
        }
    }

    /// A homomorphism onto an abelian group: the identity on abelian groups,
    /// `(t, x) ↦ (x mod q-1, t)` on BS(1,q), and (lamp total, base image)
    /// on wreath products.
    pub fn abelian_quotient(&self, x: &Element) -> Vec<i64> {
        match (self, x) {
            (Structure::Abelian { .. }, Element::Vector(coords)) => coords.to_vec(),
            (Structure::BaumslagSolitar { q }, Element::Affine(a)) => {
                if *q > 2 {
                    let residue = a.numerator.mod_floor(&BigInt::from(q - 1));
                    vec![residue.to_i64().expect("residue fits"), a.shift]
                } else {
                    vec![a.shift]
                }
            }
            (Structure::Wreath { lamp, base }, Element::Wreath(w)) => {
                let lamp_moduli = lamp.abelian_quotient_moduli();
                let mut total = vec![0i64; lamp_moduli.len()];
                for value in w.lamps.values() {
                    for ((t, v), &m) in total
                        .iter_mut()
                        .zip(lamp.abelian_quotient(value))
                        .zip(&lamp_moduli)
                    {
                        *t = reduce_coordinate(*t + v, m);
                    }
                }
                total.extend(base.abelian_quotient(&w.base));
                total
            }
            (structure, x) => panic!("element {x:?} does not match {structure:?}"),
        }
    }

    /// Order of `x`, or `None` when it is infinite.
    pub fn order(&self, x: &Element) -> Option<u64> {
        match (self, x) {
            (Structure::Abelian { moduli }, Element::Vector(coords)) => {
                let mut order = 1u64;
                for (&c, &m) in coords.iter().zip(moduli) {
                    if m == 0 {
                        if c != 0 {
                            return None;
                        }
                    } else {
                        let c = c as u64;
                        order = order.lcm(&(m / m.gcd(&c)));
                    }
                }
                Some(order)
            }
            (Structure::BaumslagSolitar { .. }, Element::Affine(_)) => {
                self.is_identity(x).then_some(1)
            }
            (Structure::Wreath { lamp, base }, Element::Wreath(w)) => {
                let base_order = base.order(&w.base)?;
                let cycle = self.power(x, base_order as i64);
                let mut lamp_order = 1u64;
                for value in cycle.as_wreath().expect("wreath element").lamps.values() {
                    lamp_order = lamp_order.lcm(&lamp.order(value)?);
                }
                Some(base_order * lamp_order)
            }
            (structure, x) => panic!("element {x:?} does not match {structure:?}"),
        }
    }

    /// Rank `r` when this is `Z^r` or a free solvable tower over it.
    pub fn tower_rank(&self) -> Option<usize> {
        match self {
            Structure::Abelian { moduli } if moduli.iter().all(|&m| m == 0) => Some(moduli.len()),
            Structure::Wreath { lamp, base } => {
                let rank = base.tower_rank()?;
                match lamp.as_ref() {
                    Structure::Abelian { moduli }
                        if moduli.len() == rank && moduli.iter().all(|&m| m == 0) =>
                    {
                        Some(rank)
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Standard generator `s_i` of the free solvable tower.
    pub fn tower_generator(&self, generator: usize) -> Option<Element> {
        let rank = self.tower_rank()?;
        match self {
            Structure::Abelian { .. } => Some(unit_vector(rank, generator)),
            Structure::Wreath { base, .. } => {
                let mut lamps = BTreeMap::new();
                lamps.insert(base.identity(), unit_vector(rank, generator));
                Some(Element::wreath(lamps, base.tower_generator(generator)?))
            }
            Structure::BaumslagSolitar { .. } => None,
        }
    }

    /// The endomorphism induced by `s_i ↦ s_i^m` on a free solvable tower:
    /// multiplication by `m` on `Z^r`, and `(a, h) ↦ (t_m a, δ_m h)` above it,
    /// where `t_m` spreads the value on edge `(x, i)` over the `m` edges
    /// `(δ_m(x) s_i^j, i)`.
    pub fn stretch(&self, x: &Element, factor: u32) -> Option<Element> {
        let rank = self.tower_rank()?;
        match (self, x) {
            (Structure::Abelian { .. }, Element::Vector(coords)) => Some(Element::Vector(
                coords.iter().map(|&c| c * i64::from(factor)).collect(),
            )),
            (Structure::Wreath { lamp, base }, Element::Wreath(w)) => {
                let steps: Vec<Element> = (0..rank)
                    .map(|i| base.tower_generator(i))
                    .collect::<Option<_>>()?;
                let mut lamps = BTreeMap::new();
                for (position, value) in &w.lamps {
                    let anchor = base.stretch(position, factor)?;
                    for (generator, &amount) in value.as_vector()?.iter().enumerate() {
                        if amount == 0 {
                            continue;
                        }
                        let mut vertex = anchor.clone();
                        let contribution = scaled_unit_vector(rank, generator, amount);
                        for _ in 0..factor {
                            add_lamp(lamp, &mut lamps, vertex.clone(), &contribution);
                            base.multiply_assign(&mut vertex, &steps[generator]);
                        }
                    }
                }
                Some(Element::wreath(lamps, base.stretch(&w.base, factor)?))
            }
            _ => None,
        }
    }
}

fn zeros(len: usize) -> Coords {
    smallvec::smallvec![0; len]
}

pub(crate) fn unit_vector(dimension: usize, coordinate: usize) -> Element {
    scaled_unit_vector(dimension, coordinate, 1)
}

pub(crate) fn scaled_unit_vector(dimension: usize, coordinate: usize, amount: i64) -> Element {
    let mut coords = zeros(dimension);
    coords[coordinate] = amount;
    Element::Vector(coords)
}

fn reduce_coordinate(value: i64, modulus: u64) -> i64 {
    if modulus == 0 {
        value
    } else {
        value.rem_euclid(modulus as i64)
    }
}

/// Adds `value` to the lamp at `position`, dropping it if it becomes trivial.
pub(crate) fn add_lamp(
    lamp: &Structure,
    lamps: &mut BTreeMap<Element, Element>,
    position: Element,
    value: &Element,
) {
    use std::collections::btree_map::Entry;
    match lamps.entry(position) {
        Entry::Vacant(slot) => {
            if !lamp.is_identity(value) {
                slot.insert(value.clone());
            }
        }
        Entry::Occupied(mut slot) => {
            lamp.multiply_assign(slot.get_mut(), value);
            if lamp.is_identity(slot.get()) {
                slot.remove();
            }
        }
    }
}

/// `x · q^power` as a numerator over `q^depth`, with nonnegative depth.
fn scale_by_power(q: u64, numerator: &BigInt, depth: u32, power: i64) -> (BigInt, u32) {
    let q = BigInt::from(q);
    if power >= 0 {
        let power = power as u32;
        if power >= depth {
            (numerator * num_traits::pow(q, (power - depth) as usize), 0)
        } else {
            (numerator.clone(), depth - power)
        }
    } else {
        (numerator.clone(), depth + power.unsigned_abs() as u32)
    }
}

fn normalize_affine(q: u64, shift: i64, mut numerator: BigInt, mut depth: u32) -> AffineElement {
    if numerator.is_zero() {
        depth = 0;
    } else {
        let q_big = BigInt::from(q);
        while depth > 0 {
            let (quotient, remainder) = numerator.div_rem(&q_big);
            if !remainder.is_zero() {
                break;
            }
            numerator = quotient;
            depth -= 1;
        }
    }
    AffineElement {
        shift,
        numerator,
        depth,
    }
}

fn affine_product(q: u64, x: &AffineElement, y: &AffineElement) -> AffineElement {
    let (scaled, scaled_depth) = scale_by_power(q, &y.numerator, y.depth, -x.shift);
    let depth = x.depth.max(scaled_depth);
    let q_big = BigInt::from(q);
    let lift = |n: &BigInt, d: u32| n * num_traits::pow(q_big.clone(), (depth - d) as usize);
    let numerator = lift(&x.numerator, x.depth) + lift(&scaled, scaled_depth);
    normalize_affine(q, x.shift + y.shift, numerator, depth)
}

impl AffineElement {
    /// The rational value `numerator / q^depth`, as a string for reports.
    pub fn value_string(&self, q: u64) -> String {
        if self.depth == 0 {
            self.numerator.to_string()
        } else if self.numerator.is_negative() {
            format!("-{}/{}^{}", -&self.numerator, q, self.depth)
        } else {
            format!("{}/{}^{}", self.numerator, q, self.depth)
        }
    }
}

impl From<WreathElement> for Element {
    fn from(w: WreathElement) -> Self {
        Element::Wreath(Box::new(w))
    }
}
