//! One block: graph, Q-normalized Laplacian and its eigenbasis.

use ragft::spectral::{apply_block, block_transform, build_block_graph, q_normalized_laplacian, BlockTransform};

fn main() -> ragft::Result<()> {
    // A 2x2x2 block with five occupied children of unequal weight.
    let coords = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 1], [0, 0, 1]];
    let q = [1.0, 3.0, 2.0, 5.0, 1.0];
    let graph = build_block_graph(&coords, &q, 3f64.sqrt());
    println!("{} edges, {} bridges", graph.edges.len(), graph.bridges);
    println!("L_Q = {:.3}", q_normalized_laplacian(&graph)?);

    let t = block_transform(&graph)?;
    println!("eigenvalues {:.4?}", t.eigenvalues());
    for k in 0..t.len() {
        println!("row {k}: {:+.4?}", t.row(k));
    }

    let sqrt_q: Vec<f64> = q.iter().map(|v| v.sqrt()).collect();
    println!("weighted constant -> {:+.4?}", apply_block(&t, &sqrt_q)?);

    let pair = BlockTransform::butterfly(1.0, 3.0);
    println!("two-point butterfly {:+.4?} {:+.4?}", pair.row(0), pair.row(1));
    Ok(())
}
