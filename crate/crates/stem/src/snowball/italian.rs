//! Italian Snowball stemmer.

use super::env::{among, Among, Env};

const V: &str = "aeiouàèìòù";
const AEIO: &str = "aeioàèìò";
const CG: &str = "cg";

fn elisions(env: &mut Env) -> bool {
    env.bra = env.cursor;
    if env.find_among(ELISIONS) == 0 {
        return false;
    }
    env.ket = env.cursor;
    if env.at_limit() {
        return false;
    }
    env.slice_del();
    true
}

/// `goto (v [ 'u' ] v -> 'U' or 'i' ] v -> 'I')`, repeated.
fn mark_semivowels(env: &mut Env) {
    loop {
        let v3 = env.cursor;
        let mut found = false;
        loop {
            let v4 = env.cursor;
            if env.in_grouping(V) {
                env.bra = env.cursor;
                let v5 = env.cursor;
                let mut done = false;
                for (ch, upper) in [('u', "U"), ('i', "I")] {
                    env.cursor = v5;
                    if env.eq_c(ch) {
                        env.ket = env.cursor;
                        if env.in_grouping(V) {
                            env.slice_from(upper);
                            done = true;
                            break;
                        }
                    }
                }
                if done {
                    env.cursor = v4;
                    found = true;
                    break;
                }
            }
            env.cursor = v4;
            if !env.next() {
                break;
            }
        }
        if !found {
            env.cursor = v3;
            break;
        }
    }
}

fn prelude(env: &mut Env) {
    let v1 = env.cursor;
    loop {
        let v2 = env.cursor;
        env.bra = env.cursor;
        let var = env.find_among(PRELUDE);
        env.ket = env.cursor;
        match var {
            1 => env.slice_from("à"),
            2 => env.slice_from("è"),
            3 => env.slice_from("ì"),
            4 => env.slice_from("ò"),
            5 => env.slice_from("ù"),
            6 => env.slice_from("qU"),
            _ => {
                if !env.next() {
                    env.cursor = v2;
                    break;
                }
            }
        }
    }
    env.cursor = v1;
    mark_semivowels(env);
}

fn mark_regions(env: &mut Env) {
    env.pv = env.limit;
    env.p1 = env.limit;
    env.p2 = env.limit;
    let v1 = env.cursor;
    'rv: {
        let v2 = env.cursor;
        if env.in_grouping(V) {
            let v3 = env.cursor;
            if env.out_grouping(V) && env.go_out_grouping(V) {
                env.cursor += 1;
                env.pv = env.cursor;
                break 'rv;
            }
            env.cursor = v3;
            if env.in_grouping(V) && env.go_in_grouping(V) {
                env.cursor += 1;
                env.pv = env.cursor;
                break 'rv;
            }
        }
        env.cursor = v2;
        if env.eq_s("divan") {
            env.pv = env.cursor;
            break 'rv;
        }
        env.cursor = v2;
        if !env.out_grouping(V) {
            break 'rv;
        }
        let v4 = env.cursor;
        if env.out_grouping(V) && env.go_out_grouping(V) {
            env.cursor += 1;
            env.pv = env.cursor;
            break 'rv;
        }
        env.cursor = v4;
        if !env.in_grouping(V) || !env.next() {
            break 'rv;
        }
        env.pv = env.cursor;
    }
    env.cursor = v1;
    let v5 = env.cursor;
    'r: {
        if !env.go_out_grouping(V) {
            break 'r;
        }
        env.cursor += 1;
        if !env.go_in_grouping(V) {
            break 'r;
        }
        env.cursor += 1;
        env.p1 = env.cursor;
        if !env.go_out_grouping(V) {
            break 'r;
        }
        env.cursor += 1;
        if !env.go_in_grouping(V) {
            break 'r;
        }
        env.cursor += 1;
        env.p2 = env.cursor;
    }
    env.cursor = v5;
}

fn postlude(env: &mut Env) {
    loop {
        let v1 = env.cursor;
        env.bra = env.cursor;
        let var = env.find_among(POSTLUDE);
        env.ket = env.cursor;
        match var {
            1 => env.slice_from("i"),
            2 => env.slice_from("u"),
            _ => {
                if !env.next() {
                    env.cursor = v1;
                    break;
                }
            }
        }
    }
}

fn rv(env: &Env) -> bool {
    env.pv <= env.cursor
}

fn r2(env: &Env) -> bool {
    env.p2 <= env.cursor
}

fn attached_pronoun(env: &mut Env) -> bool {
    env.ket = env.cursor;
    if env.find_among_b(PRONOUNS) == 0 {
        return false;
    }
    env.bra = env.cursor;
    let var = env.find_among_b(PRONOUN_HOSTS);
    if var == 0 || !rv(env) {
        return false;
    }
    env.slice_from(if var == 1 { "" } else { "e" });
    true
}

/// Optionally deletes `s` immediately before the cursor when it lies in R2.
/// Leaves the cursor at `saved` (measured from the end) on failure.
fn delete_in_r2(env: &mut Env, s: &str, saved: usize) -> bool {
    env.ket = env.cursor;
    if !env.eq_s_b(s) {
        env.restore_from_end(saved);
        return false;
    }
    env.bra = env.cursor;
    if !r2(env) {
        env.restore_from_end(saved);
        return false;
    }
    env.slice_del();
    true
}

fn standard_suffix(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(STANDARD);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    match var {
        1 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
        }
        2 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v1 = env.from_end();
            delete_in_r2(env, "ic", v1);
        }
        3 => {
            if !r2(env) {
                return false;
            }
            env.slice_from("log");
        }
        4 => {
            if !r2(env) {
                return false;
            }
            env.slice_from("u");
        }
        5 => {
            if !r2(env) {
                return false;
            }
            env.slice_from("ente");
        }
        6 => {
            if !rv(env) {
                return false;
            }
            env.slice_del();
        }
        7 => {
            if env.p1 > env.cursor {
                return false;
            }
            env.slice_del();
            let v2 = env.from_end();
            env.ket = env.cursor;
            let var = env.find_among_b(AFTER_AMENTE);
            if var == 0 {
                env.restore_from_end(v2);
            } else {
                env.bra = env.cursor;
                if !r2(env) {
                    env.restore_from_end(v2);
                } else {
                    env.slice_del();
                    if var == 1 {
                        delete_in_r2(env, "at", v2);
                    }
                }
            }
        }
        8 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v3 = env.from_end();
            env.ket = env.cursor;
            if env.find_among_b(AFTER_ITA) == 0 {
                env.restore_from_end(v3);
            } else {
                env.bra = env.cursor;
                if r2(env) {
                    env.slice_del();
                } else {
                    env.restore_from_end(v3);
                }
            }
        }
        _ => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v4 = env.from_end();
            if delete_in_r2(env, "at", v4) {
                delete_in_r2(env, "ic", v4);
            }
        }
    }
    true
}

fn verb_suffix(env: &mut Env) -> bool {
    if env.cursor < env.pv {
        return false;
    }
    let saved_lb = env.limit_backward;
    env.limit_backward = env.pv;
    env.ket = env.cursor;
    if env.find_among_b(VERB) == 0 {
        env.limit_backward = saved_lb;
        return false;
    }
    env.bra = env.cursor;
    env.slice_del();
    env.limit_backward = saved_lb;
    true
}

fn vowel_suffix(env: &mut Env) {
    let v1 = env.from_end();
    'final_vowel: {
        env.ket = env.cursor;
        if !env.in_grouping_b(AEIO) {
            env.restore_from_end(v1);
            break 'final_vowel;
        }
        env.bra = env.cursor;
        if !rv(env) {
            env.restore_from_end(v1);
            break 'final_vowel;
        }
        env.slice_del();
        env.ket = env.cursor;
        if !env.eq_c_b('i') {
            env.restore_from_end(v1);
            break 'final_vowel;
        }
        env.bra = env.cursor;
        if !rv(env) {
            env.restore_from_end(v1);
            break 'final_vowel;
        }
        env.slice_del();
    }
    let v2 = env.from_end();
    env.ket = env.cursor;
    if !env.eq_c_b('h') {
        env.restore_from_end(v2);
        return;
    }
    env.bra = env.cursor;
    if !env.in_grouping_b(CG) || !rv(env) {
        env.restore_from_end(v2);
        return;
    }
    env.slice_del();
}

pub(crate) fn stem(env: &mut Env) {
    let v1 = env.cursor;
    elisions(env);
    env.cursor = v1;
    let v2 = env.cursor;
    prelude(env);
    env.cursor = v2;
    mark_regions(env);
    env.limit_backward = env.cursor;
    env.cursor = env.limit;

    let v3 = env.from_end();
    attached_pronoun(env);
    env.restore_from_end(v3);
    let v4 = env.from_end();
    if !standard_suffix(env) {
        env.restore_from_end(v4);
        verb_suffix(env);
    }
    env.restore_from_end(v4);
    let v6 = env.from_end();
    vowel_suffix(env);
    env.restore_from_end(v6);

    env.cursor = env.limit_backward;
    let v7 = env.cursor;
    postlude(env);
    env.cursor = v7;
}

const ELISIONS: &[Among] = &[
    among("all'", -1),
    among("d'", -1),
    among("dall'", -1),
    among("dell'", -1),
    among("gl'", -1),
    among("l'", -1),
    among("m'", -1),
    among("nell'", -1),
    among("quell'", -1),
    among("quest'", -1),
    among("s'", -1),
    among("sull'", -1),
    among("t'", -1),
    among("tutt'", -1),
    among("un'", -1),
    among("v'", -1),
];
const PRELUDE: &[Among] = &[
    among("", 7),
    among("qu", 6),
    among("á", 1),
    among("é", 2),
    among("í", 3),
    among("ó", 4),
    among("ú", 5),
];
const POSTLUDE: &[Among] = &[
    among("", 3),
    among("I", 1),
    among("U", 2),
];
const PRONOUNS: &[Among] = &[
    among("la", -1),
    among("cela", -1),
    among("gliela", -1),
    among("mela", -1),
    among("tela", -1),
    among("vela", -1),
    among("le", -1),
    among("cele", -1),
    among("gliele", -1),
    among("mele", -1),
    among("tele", -1),
    among("vele", -1),
    among("ne", -1),
    among("cene", -1),
    among("gliene", -1),
    among("mene", -1),
    among("sene", -1),
    among("tene", -1),
    among("vene", -1),
    among("ci", -1),
    among("li", -1),
    among("celi", -1),
    among("glieli", -1),
    among("meli", -1),
    among("teli", -1),
    among("veli", -1),
    among("gli", -1),
    among("mi", -1),
    among("si", -1),
    among("ti", -1),
    among("vi", -1),
    among("lo", -1),
    among("celo", -1),
    among("glielo", -1),
    among("melo", -1),
    among("telo", -1),
    among("velo", -1),
];
const PRONOUN_HOSTS: &[Among] = &[
    among("ando", 1),
    among("endo", 1),
    among("ar", 2),
    among("er", 2),
    among("ir", 2),
];
const AFTER_AMENTE: &[Among] = &[
    among("ic", -1),
    among("abil", -1),
    among("os", -1),
    among("iv", 1),
];
const AFTER_ITA: &[Among] = &[
    among("ic", 1),
    among("abil", 1),
    among("iv", 1),
];
const STANDARD: &[Among] = &[
    among("ica", 1),
    among("logia", 3),
    among("osa", 1),
    among("ista", 1),
    among("iva", 9),
    among("anza", 1),
    among("enza", 5),
    among("ice", 1),
    among("atrice", 1),
    among("iche", 1),
    among("logie", 3),
    among("abile", 1),
    among("ibile", 1),
    among("usione", 4),
    among("azione", 2),
    among("uzione", 4),
    among("atore", 2),
    among("ose", 1),
    among("ante", 1),
    among("mente", 1),
    among("amente", 7),
    among("iste", 1),
    among("ive", 9),
    among("anze", 1),
    among("enze", 5),
    among("ici", 1),
    among("atrici", 1),
    among("ichi", 1),
    among("abili", 1),
    among("ibili", 1),
    among("ismi", 1),
    among("usioni", 4),
    among("azioni", 2),
    among("uzioni", 4),
    among("atori", 2),
    among("osi", 1),
    among("anti", 1),
    among("amenti", 6),
    among("imenti", 6),
    among("isti", 1),
    among("ivi", 9),
    among("ico", 1),
    among("ismo", 1),
    among("oso", 1),
    among("amento", 6),
    among("imento", 6),
    among("ivo", 9),
    among("ità", 8),
    among("istà", 1),
    among("istè", 1),
    among("istì", 1),
];
const VERB: &[Among] = &[
    among("isca", 1),
    among("enda", 1),
    among("ata", 1),
    among("ita", 1),
    among("uta", 1),
    among("ava", 1),
    among("eva", 1),
    among("iva", 1),
    among("erebbe", 1),
    among("irebbe", 1),
    among("isce", 1),
    among("ende", 1),
    among("are", 1),
    among("ere", 1),
    among("ire", 1),
    among("asse", 1),
    among("ate", 1),
    among("avate", 1),
    among("evate", 1),
    among("ivate", 1),
    among("ete", 1),
    among("erete", 1),
    among("irete", 1),
    among("ite", 1),
    among("ereste", 1),
    among("ireste", 1),
    among("ute", 1),
    among("erai", 1),
    among("irai", 1),
    among("isci", 1),
    among("endi", 1),
    among("erei", 1),
    among("irei", 1),
    among("assi", 1),
    among("ati", 1),
    among("iti", 1),
    among("eresti", 1),
    among("iresti", 1),
    among("uti", 1),
    among("avi", 1),
    among("evi", 1),
    among("ivi", 1),
    among("isco", 1),
    among("ando", 1),
    among("endo", 1),
    among("Yamo", 1),
    among("iamo", 1),
    among("avamo", 1),
    among("evamo", 1),
    among("ivamo", 1),
    among("eremo", 1),
    among("iremo", 1),
    among("assimo", 1),
    among("ammo", 1),
    among("emmo", 1),
    among("eremmo", 1),
    among("iremmo", 1),
    among("immo", 1),
    among("ano", 1),
    among("iscano", 1),
    among("avano", 1),
    among("evano", 1),
    among("ivano", 1),
    among("eranno", 1),
    among("iranno", 1),
    among("ono", 1),
    among("iscono", 1),
    among("arono", 1),
    among("erono", 1),
    among("irono", 1),
    among("erebbero", 1),
    among("irebbero", 1),
    among("assero", 1),
    among("essero", 1),
    among("issero", 1),
    among("ato", 1),
    among("ito", 1),
    among("uto", 1),
    among("avo", 1),
    among("evo", 1),
    among("ivo", 1),
    among("ar", 1),
    among("ir", 1),
    among("erà", 1),
    among("irà", 1),
    among("erò", 1),
    among("irò", 1),
];
