//! Named complexes used as regression witnesses.

use crate::complex::Complex;

fn from_triples(n: usize, tris: &[[usize; 3]]) -> Complex {
    Complex::new(n, tris.iter().map(|t| t.to_vec())).expect("fixture is a valid complex")
}

fn one_based(n: usize, tris: &[u32]) -> Complex {
    let facets: Vec<Vec<usize>> = tris
        .iter()
        .map(|&t| vec![(t / 100) as usize - 1, (t / 10 % 10) as usize - 1, (t % 10) as usize - 1])
        .collect();
    Complex::new(n, facets).expect("fixture is a valid complex")
}

/// Six-vertex minimal triangulation of the real projective plane.
pub fn rp2() -> Complex {
    one_based(6, &[123, 124, 156, 256, 245, 135, 146, 346, 236, 345])
}

/// Seven-vertex minimal triangulation of the torus (Császár).
pub fn csaszar_torus() -> Complex {
    one_based(7, &[124, 127, 135, 136, 146, 157, 234, 235, 256, 267, 347, 367, 456, 457])
}

/// Boundary of the tetrahedron.
pub fn boundary_tetrahedron() -> Complex {
    from_triples(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
}

/// Eight vertices, 19 triangles, fundamental group the braid group on three strands.
pub fn braid_b3() -> Complex {
    from_triples(8, &[
        [0, 1, 4], [0, 1, 7], [0, 2, 3], [0, 2, 5], [0, 3, 4], [0, 5, 6], [0, 6, 7], [1, 2, 3],
        [1, 2, 4], [1, 3, 6], [1, 5, 6], [1, 5, 7], [2, 4, 7], [2, 5, 7], [3, 4, 5], [3, 5, 7],
        [3, 6, 7], [4, 5, 6], [4, 6, 7],
    ])
}

/// Nine vertices, 26 triangles, fundamental group dihedral of order 6.
pub fn dihedral_d6() -> Complex {
    from_triples(9, &[
        [0, 1, 4], [0, 1, 7], [0, 2, 3], [0, 2, 5], [0, 3, 4], [0, 5, 6], [0, 6, 7], [1, 2, 3],
        [1, 2, 4], [1, 3, 6], [1, 4, 8], [1, 5, 6], [1, 5, 7], [1, 6, 8], [2, 3, 8], [2, 4, 6],
        [2, 4, 7], [2, 5, 7], [2, 6, 8], [3, 4, 5], [3, 5, 7], [3, 6, 7], [3, 7, 8], [4, 5, 6],
        [4, 6, 7], [4, 7, 8],
    ])
}

/// Nine vertices, 29 triangles, fundamental group the quaternion group.
pub fn quaternion_q8() -> Complex {
    from_triples(9, &[
        [0, 1, 2], [0, 1, 3], [0, 1, 6], [0, 2, 3], [0, 2, 7], [0, 4, 5], [0, 4, 6], [0, 4, 7],
        [0, 5, 6], [0, 5, 8], [0, 7, 8], [1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 4, 8], [1, 5, 7],
        [1, 6, 7], [1, 6, 8], [2, 3, 5], [2, 4, 5], [2, 4, 8], [2, 5, 6], [2, 6, 7], [2, 7, 8],
        [3, 4, 6], [3, 4, 7], [3, 5, 7], [3, 5, 8], [3, 6, 8],
    ])
}
