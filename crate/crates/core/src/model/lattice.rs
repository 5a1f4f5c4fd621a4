use std::cell::OnceCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::value::{split_arrow, Point};
use super::{Model, ModelError};
use crate::syntax::SimpleType;

/// All elements of `D^k_A`, with an index for lookups.
pub struct Lattice {
    pub k: usize,
    pub ty: SimpleType,
    elems: Vec<Point>,
    index: HashMap<Point, usize>,
    order: OnceCell<Order>,
    pub(crate) down_idx: OnceCell<Vec<usize>>,
    pub(crate) up_inf_idx: OnceCell<Vec<usize>>,
    pub(crate) up_sup_idx: OnceCell<Vec<usize>>,
}

/// A linear extension of the order and the lower covers of each element.
pub(crate) struct Order {
    pub linear: Vec<usize>,
    pub covers: Vec<Vec<usize>>,
}

impl Lattice {
    fn new(k: usize, ty: SimpleType, elems: Vec<Point>) -> Lattice {
        let index = elems.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Lattice {
            k,
            ty,
            elems,
            index,
            order: OnceCell::new(),
            down_idx: OnceCell::new(),
            up_inf_idx: OnceCell::new(),
            up_sup_idx: OnceCell::new(),
        }
    }

    pub fn elems(&self) -> &[Point] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index.contains_key(p)
    }

    pub fn bottom(&self) -> &Point {
        self.elems
            .iter()
            .find(|p| self.elems.iter().all(|q| p.leq(q)))
            .expect("lattice has a bottom")
    }

    pub fn top(&self) -> &Point {
        self.elems
            .iter()
            .find(|p| self.elems.iter().all(|q| q.leq(p)))
            .expect("lattice has a top")
    }

    pub(crate) fn order(&self) -> &Order {
        self.order.get_or_init(|| {
            let n = self.elems.len();
            let below: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    (0..n)
                        .filter(|&j| j != i && self.elems[j].leq(&self.elems[i]))
                        .collect()
                })
                .collect();
            let mut linear: Vec<usize> = (0..n).collect();
            linear.sort_by_key(|&i| below[i].len());
            let covers = (0..n)
                .map(|i| {
                    below[i]
                        .iter()
                        .copied()
                        .filter(|&j| {
                            !below[i]
                                .iter()
                                .any(|&m| m != j && self.elems[j].leq(&self.elems[m]))
                        })
                        .collect()
                })
                .collect();
            Order { linear, covers }
        })
    }
}

impl Model {
    /// The lattice `D^k_A`, built on first use and cached.
    pub fn lattice(&self, k: usize, ty: &SimpleType) -> Result<Rc<Lattice>, ModelError> {
        self.check_stratum(k)?;
        if let Some(l) = self.lattices.borrow().get(&(k, ty.clone())) {
            return Ok(l.clone());
        }
        let elems = match ty.as_arrow() {
            None => self.waa.rank_le(k).subsets().map(Point::Set).collect::<Vec<_>>(),
            Some(_) => self.enumerate_arrow(k, ty)?,
        };
        let l = Rc::new(Lattice::new(k, ty.clone(), elems));
        self.lattices.borrow_mut().insert((k, ty.clone()), l.clone());
        Ok(l)
    }

    fn too_large(&self, k: usize, ty: &SimpleType, size: usize) -> ModelError {
        ModelError::LatticeTooLarge {
            k,
            ty: ty.clone(),
            size,
            cap: self.cap,
        }
    }

    /// Monotone tables `f` over `D^k_A` such that `f(e)↓` depends only on
    /// `e↓` through an element of `D^{k-1}_{A→B}`.
    fn enumerate_arrow(&self, k: usize, ty: &SimpleType) -> Result<Vec<Point>, ModelError> {
        let (a, b) = split_arrow(ty);
        let dom = self.lattice(k, a)?;
        let cod = self.lattice(k, b)?;
        let n = dom.len();
        let mut classes: Vec<Vec<Vec<usize>>> = Vec::new();
        if k == 0 {
            classes.push(vec![(0..cod.len()).collect(); n]);
        } else {
            let lower = self.lattice(k - 1, ty)?;
            let lower_cod = self.lattice(k - 1, b)?;
            let dom_down = self.down_indices(k, a)?;
            let cod_down = self.down_indices(k, b)?;
            let mut groups = vec![Vec::new(); lower_cod.len()];
            for (c, &d) in cod_down.iter().enumerate() {
                groups[d].push(c);
            }
            for f1 in lower.elems() {
                let t = f1.table();
                classes.push(
                    (0..n)
                        .map(|e| {
                            let target = lower_cod
                                .index_of(&t[dom_down[e]])
                                .expect("lower table results lie in the lower lattice");
                            groups[target].clone()
                        })
                        .collect(),
                );
            }
        }
        let order = dom.order();
        let mut out = Vec::new();
        for cands in &classes {
            let mut assign = vec![usize::MAX; n];
            self.backtrack(
                0,
                &order.linear,
                &order.covers,
                cands,
                &cod,
                &mut assign,
                &mut out,
                ty,
                k,
            )?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn backtrack(
        &self,
        pos: usize,
        linear: &[usize],
        covers: &[Vec<usize>],
        cands: &[Vec<usize>],
        cod: &Lattice,
        assign: &mut Vec<usize>,
        out: &mut Vec<Point>,
        ty: &SimpleType,
        k: usize,
    ) -> Result<(), ModelError> {
        if pos == linear.len() {
            if out.len() >= self.cap {
                return Err(self.too_large(k, ty, out.len() + 1));
            }
            out.push(Point::Table(
                assign.iter().map(|&c| cod.elems()[c].clone()).collect(),
            ));
            return Ok(());
        }
        let e = linear[pos];
        for &c in &cands[e] {
            let cp = &cod.elems()[c];
            if covers[e].iter().all(|&p| cod.elems()[assign[p]].leq(cp)) {
                assign[e] = c;
                self.backtrack(pos + 1, linear, covers, cands, cod, assign, out, ty, k)?;
            }
        }
        assign[e] = usize::MAX;
        Ok(())
    }

    /// For every element of `D^k_A`, the index of its projection in
    /// `D^{k-1}_A`.
    pub(crate) fn down_indices(&self, k: usize, ty: &SimpleType) -> Result<Rc<[usize]>, ModelError> {
        let l = self.lattice(k, ty)?;
        if let Some(v) = l.down_idx.get() {
            return Ok(v.as_slice().into());
        }
        let lower = self.lattice(k - 1, ty)?;
        let mut v = Vec::with_capacity(l.len());
        for p in l.elems() {
            let d = self.down_point(k, ty, p)?;
            v.push(lower.index_of(&d).expect("projection stays in the lower lattice"));
        }
        let _ = l.down_idx.set(v.clone());
        Ok(v.into())
    }

    /// For every element of `D^{k-1}_A`, the index of its `↑inf` (or `↑sup`)
    /// lift in `D^k_A`.
    pub(crate) fn up_indices(&self, k: usize, ty: &SimpleType, sup: bool) -> Result<Rc<[usize]>, ModelError> {
        let lower = self.lattice(k - 1, ty)?;
        let cell = if sup { &lower.up_sup_idx } else { &lower.up_inf_idx };
        if let Some(v) = cell.get() {
            return Ok(v.as_slice().into());
        }
        let upper = self.lattice(k, ty)?;
        let mut v = Vec::with_capacity(lower.len());
        for p in lower.elems() {
            let u = self.up_point(k, ty, p, sup)?;
            v.push(upper.index_of(&u).expect("lift stays in the upper lattice"));
        }
        let _ = cell.set(v.clone());
        Ok(v.into())
    }
}
