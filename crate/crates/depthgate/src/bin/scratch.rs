use depthgate::bits::{BitVector, OutputSet};
use depthgate::layers::*;
use depthgate::network::reflect_layer;
use depthgate::perm::Permutation;

fn phi(n: usize, set: &OutputSet) -> OutputSet {
    // reverse channels and complement values
    let mut out = OutputSet::empty(n).unwrap();
    let mask = (1u32 << n) - 1;
    for v in set.iter_values() {
        let neg = !v & mask;
        let mut rev = 0u32;
        for i in 0..n {
            if neg >> i & 1 == 1 {
                rev |= 1 << (n - 1 - i);
            }
        }
        out.insert_value(rev);
    }
    out
}

fn apply_perm(n: usize, perm: &Permutation, set: &OutputSet) -> OutputSet {
    let mut out = OutputSet::empty(n).unwrap();
    for v in set.iter_values() {
        out.insert_value(perm.apply_to_bits(&BitVector::new(n, v)).value());
    }
    out
}

fn main() {
    let n = 13;
    let candidates = second_layer_candidates(n, false).unwrap();
    let group = fixing_group(n);
    println!("candidates: {}", candidates.len());

    let profiles: Vec<LayerProfile> =
        candidates.layers().iter().map(|l| LayerProfile::build(n, l)).collect();
    let reflected_images: Vec<OutputSet> =
        profiles.iter().map(|p| phi(n, &p.outputs)).collect();

    // H-level pairing on output sets: partner(s) = r iff
    // outputs(F;r) = pi(phi(outputs(F;s))) for some pi in H_n
    let mut partner = vec![None; candidates.len()];
    for s in 0..candidates.len() {
        'outer: for perm in group.perms() {
            let image = apply_perm(n, perm, &reflected_images[s]);
            for r in 0..candidates.len() {
                if profiles[r].outputs == image {
                    partner[s] = Some(r);
                    break 'outer;
                }
            }
        }
    }

    let mut fixed = 0;
    let mut paired = 0;
    let mut unmatched = 0;
    let mut asymmetric = 0;
    for s in 0..candidates.len() {
        match partner[s] {
            Some(r) if r == s => fixed += 1,
            Some(r) => {
                if partner[r] != Some(s) {
                    asymmetric += 1;
                }
                paired += 1;
            }
            None => unmatched += 1,
        }
    }
    println!("fixed={fixed} paired={paired} pairs={} unmatched={unmatched} asym={asymmetric}", paired / 2);
    let kept = fixed + paired / 2 + unmatched;
    println!("kept = {kept}");

    // also check the same pairing at the semantic level per reflect+H of
    // the layer itself (layer-level H-equality of output sets)
    let mut kept2 = 0;
    for (s, layer) in candidates.layers().iter().enumerate() {
        let refl = reflect_layer(n, layer);
        let refl_prof = LayerProfile::build(n, &refl);
        let mut p = None;
        'outer2: for perm in group.perms() {
            let image = apply_perm(n, perm, &refl_prof.outputs);
            for r in 0..candidates.len() {
                if profiles[r].outputs == image {
                    p = Some(r);
                    break 'outer2;
                }
            }
        }
        match p {
            None => kept2 += 1,
            Some(r) => {
                if candidates.layers()[r].code() >= layer.code() {
                    kept2 += 1;
                }
            }
        }
        let _ = s;
    }
    println!("kept (layer-level reflect) = {kept2}");
}
