use std::collections::BTreeSet;

use super::{ComplexKind, ElementaryPath, HigherOrderComplex, LiftError, MemberId};
use crate::graph::Vertex;

/// Cyclic-shifting families of a ring: `families[p]` holds every canonical
/// sub-walk with `p + 1` vertices taken along any rotation of the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFamily {
    pub ring: Vec<Vertex>,
    pub families: Vec<Vec<ElementaryPath>>,
}

impl CyclicFamily {
    /// Dimension of the ring read as an elementary path.
    pub fn top_dim(&self) -> usize {
        self.ring.len() - 1
    }

    pub fn family(&self, p: usize) -> &[ElementaryPath] {
        &self.families[p]
    }

    /// Ids of the family members inside a path complex, or `None` if one is missing.
    pub fn member_ids(&self, cx: &HigherOrderComplex) -> Option<Vec<Vec<MemberId>>> {
        if cx.kind() != ComplexKind::Path {
            return None;
        }
        self.families
            .iter()
            .map(|fam| fam.iter().map(|e| cx.find(e.as_slice())).collect())
            .collect()
    }
}

/// Families for an arbitrary ring given as a cyclic vertex sequence (at least 3 vertices).
pub fn cyclic_families_of_ring(ring: &[Vertex]) -> CyclicFamily {
    assert!(ring.len() >= 3, "a ring has at least three vertices");
    let m = ring.len();
    let families = (0..m)
        .map(|p| {
            let set: BTreeSet<ElementaryPath> = (0..m)
                .map(|start| {
                    let walk: Vec<Vertex> = (0..=p).map(|i| ring[(start + i) % m]).collect();
                    ElementaryPath::new(&walk)
                })
                .collect();
            set.into_iter().collect()
        })
        .collect();
    CyclicFamily {
        ring: ring.to_vec(),
        families,
    }
}

/// Families of a 2-cell of a ring complex.
pub fn cyclic_families(cx: &HigherOrderComplex, cell: MemberId) -> Result<CyclicFamily, LiftError> {
    if cx.kind() != ComplexKind::Cell || (cell as usize) >= cx.len() || cx.dim_of(cell) != 2 {
        return Err(LiftError::NotACell(cell));
    }
    Ok(cyclic_families_of_ring(cx.carrier(cell)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{lift_path_complex, lift_ring_complex};
    use crate::graph::SimpleGraph;

    fn names(f: &CyclicFamily, p: usize) -> Vec<String> {
        f.family(p).iter().map(ToString::to_string).collect()
    }

    #[test]
    fn square_listing() {
        let f = cyclic_families_of_ring(&[1, 0, 2, 3]);
        assert_eq!(names(&f, 3), ["e0132", "e0231", "e1023", "e2013"]);
        assert_eq!(names(&f, 2), ["e013", "e023", "e102", "e132"]);
        assert_eq!(names(&f, 1), ["e01", "e02", "e13", "e23"]);
        assert_eq!(names(&f, 0), ["e0", "e1", "e2", "e3"]);
    }

    #[test]
    fn triangle_listing() {
        let f = cyclic_families_of_ring(&[0, 1, 2]);
        assert_eq!(names(&f, 2), ["e012", "e021", "e102"]);
        assert_eq!(names(&f, 1).len(), 3);
        assert_eq!(names(&f, 0).len(), 3);
    }

    #[test]
    fn from_cell_complex() {
        let g = SimpleGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let cells = lift_ring_complex(&g, 4).unwrap();
        let cell = cells.ids_of_dim(2).start;
        let f = cyclic_families(&cells, cell).unwrap();
        assert_eq!(f, cyclic_families_of_ring(&[0, 1, 3, 2]));
        assert!(cyclic_families(&cells, 0).is_err());
        let paths = lift_path_complex(&g, 3).unwrap();
        let ids = f.member_ids(&paths).unwrap();
        assert_eq!(ids.iter().map(Vec::len).collect::<Vec<_>>(), [4, 4, 4, 4]);
    }
}
