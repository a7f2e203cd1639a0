use super::SymMatrix;

/// Blocks of the sparsity graph (i ~ j iff M(i,j) != 0). Each block is sorted; blocks
/// come largest first, ties broken by smallest member.
pub fn connected_components(m: &SymMatrix) -> Vec<Vec<usize>> {
    let adj = m.adjacency();
    let n = m.order();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut block = Vec::new();
        while let Some(x) = stack.pop() {
            block.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn diagonal_gives_singletons() {
        let m = SymMatrix::scalar(4, &int(3));
        assert_eq!(connected_components(&m), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn ordering_by_size_then_member() {
        let mut m = SymMatrix::zeros(6);
        m.set(4, 5, int(1));
        m.set(1, 3, int(-1));
        m.set(3, 2, int(2));
        assert_eq!(connected_components(&m), vec![vec![1, 2, 3], vec![4, 5], vec![0]]);
    }
}
