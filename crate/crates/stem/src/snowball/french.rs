//! French Snowball stemmer.

use super::env::{among, Among, Env};

const V: &str = "aeiouyàâèéêëîïôùû";
const OUX_ENDING: &str = "bhjlnp";
const ELISION_CHAR: &str = "cdjlmnst";
const KEEP_WITH_S: &str = "aiosuè";

const RV_PREFIXES: &[Among] = &[among("col", -1), among("ni", 1), among("par", -1), among("tap", -1)];

const POSTLUDE: &[Among] = &[
    among("", 7),
    among("H", 6),
    among("He", 4),
    among("Hi", 5),
    among("I", 1),
    among("U", 2),
    among("Y", 3),
];

const AFTER_EMENT: &[Among] = &[
    among("iqU", 3),
    among("abl", 3),
    among("Ièr", 4),
    among("ièr", 4),
    among("eus", 2),
    among("iv", 1),
];

const AFTER_ITE: &[Among] = &[among("ic", 2), among("abil", 1), among("iv", 3)];

const STANDARD: &[Among] = &[
    among("iqUe", 1),
    among("atrice", 2),
    among("ance", 1),
    among("ence", 5),
    among("logie", 3),
    among("able", 1),
    among("isme", 1),
    among("euse", 12),
    among("iste", 1),
    among("ive", 8),
    among("if", 8),
    among("usion", 4),
    among("ation", 2),
    among("ution", 4),
    among("ateur", 2),
    among("iqUes", 1),
    among("atrices", 2),
    among("ances", 1),
    among("ences", 5),
    among("logies", 3),
    among("ables", 1),
    among("ismes", 1),
    among("euses", 12),
    among("istes", 1),
    among("ives", 8),
    among("ifs", 8),
    among("usions", 4),
    among("ations", 2),
    among("utions", 4),
    among("ateurs", 2),
    among("ments", 16),
    among("ements", 6),
    among("issements", 13),
    among("ités", 7),
    among("ment", 16),
    among("ement", 6),
    among("issement", 13),
    among("amment", 14),
    among("emment", 15),
    among("aux", 10),
    among("eaux", 9),
    among("eux", 1),
    among("oux", 11),
    among("ité", 7),
];

const I_VERB: &[Among] = &[
    among("ira", 1),
    among("ie", 1),
    among("isse", 1),
    among("issante", 1),
    among("i", 1),
    among("irai", 1),
    among("ir", 1),
    among("iras", 1),
    among("ies", 1),
    among("îmes", 1),
    among("isses", 1),
    among("issantes", 1),
    among("îtes", 1),
    among("is", 1),
    among("irais", 1),
    among("issais", 1),
    among("irions", 1),
    among("issions", 1),
    among("irons", 1),
    among("issons", 1),
    among("issants", 1),
    among("it", 1),
    among("irait", 1),
    among("issait", 1),
    among("issant", 1),
    among("iraIent", 1),
    among("issaIent", 1),
    among("irent", 1),
    among("issent", 1),
    among("iront", 1),
    among("ît", 1),
    among("iriez", 1),
    among("issiez", 1),
    among("irez", 1),
    among("issez", 1),
];

const AISE_GUARD: &[Among] = &[among("al", 1), among("épl", -1), among("auv", -1)];

const VERB: &[Among] = &[
    among("a", 3),
    among("era", 2),
    among("aise", 4),
    among("asse", 3),
    among("ante", 3),
    among("ée", 2),
    among("ai", 3),
    among("erai", 2),
    among("er", 2),
    among("as", 3),
    among("eras", 2),
    among("âmes", 3),
    among("aises", 4),
    among("asses", 3),
    among("antes", 3),
    among("âtes", 3),
    among("ées", 2),
    among("ais", 4),
    among("eais", 2),
    among("erais", 2),
    among("ions", 1),
    among("erions", 2),
    among("assions", 3),
    among("erons", 2),
    among("ants", 3),
    among("és", 2),
    among("ait", 3),
    among("erait", 2),
    among("ant", 3),
    among("aIent", 3),
    among("eraIent", 2),
    among("èrent", 2),
    among("assent", 3),
    among("eront", 2),
    among("ât", 3),
    among("ez", 2),
    among("iez", 2),
    among("eriez", 2),
    among("assiez", 3),
    among("erez", 2),
    among("é", 2),
];

const RESIDUAL: &[Among] = &[
    among("e", 3),
    among("Ière", 2),
    among("ière", 2),
    among("ion", 1),
    among("Ier", 2),
    among("ier", 2),
];

const UNDOUBLE: &[Among] = &[
    among("ell", -1),
    among("eill", -1),
    among("enn", -1),
    among("onn", -1),
    among("ett", -1),
];

fn elisions(env: &mut Env) -> bool {
    env.bra = env.cursor;
    if !env.in_grouping(ELISION_CHAR) && !env.eq_s("qu") {
        return false;
    }
    if !env.eq_c('\'') {
        return false;
    }
    env.ket = env.cursor;
    if env.at_limit() {
        return false;
    }
    env.slice_del();
    true
}

/// Tries each prelude rewrite at the cursor; true when one applied.
fn prelude_at(env: &mut Env) -> bool {
    let v3 = env.cursor;
    if env.in_grouping(V) {
        env.bra = env.cursor;
        let v4 = env.cursor;
        if env.eq_c('u') {
            env.ket = env.cursor;
            if env.in_grouping(V) {
                env.slice_from("U");
                return true;
            }
        }
        env.cursor = v4;
        if env.eq_c('i') {
            env.ket = env.cursor;
            if env.in_grouping(V) {
                env.slice_from("I");
                return true;
            }
        }
        env.cursor = v4;
        if env.eq_c('y') {
            env.ket = env.cursor;
            env.slice_from("Y");
            return true;
        }
    }
    env.cursor = v3;
    env.bra = env.cursor;
    if env.eq_c('ë') {
        env.ket = env.cursor;
        env.slice_from("He");
        return true;
    }
    env.cursor = v3;
    env.bra = env.cursor;
    if env.eq_c('ï') {
        env.ket = env.cursor;
        env.slice_from("Hi");
        return true;
    }
    env.cursor = v3;
    env.bra = env.cursor;
    if env.eq_c('y') {
        env.ket = env.cursor;
        if env.in_grouping(V) {
            env.slice_from("Y");
            return true;
        }
    }
    env.cursor = v3;
    if env.eq_c('q') {
        env.bra = env.cursor;
        if env.eq_c('u') {
            env.ket = env.cursor;
            env.slice_from("U");
            return true;
        }
    }
    false
}

fn prelude(env: &mut Env) {
    loop {
        let v1 = env.cursor;
        let mut found = false;
        loop {
            let v2 = env.cursor;
            if prelude_at(env) {
                env.cursor = v2;
                found = true;
                break;
            }
            env.cursor = v2;
            if !env.next() {
                break;
            }
        }
        if !found {
            env.cursor = v1;
            break;
        }
    }
}

fn mark_regions(env: &mut Env) {
    env.pv = env.limit;
    env.p1 = env.limit;
    env.p2 = env.limit;
    let v1 = env.cursor;
    'rv: {
        let v2 = env.cursor;
        if env.in_grouping(V) && env.in_grouping(V) && env.next() {
            env.pv = env.cursor;
            break 'rv;
        }
        env.cursor = v2;
        let var = env.find_among(RV_PREFIXES);
        if var != 0 && (var != 1 || env.in_grouping(V)) {
            env.pv = env.cursor;
            break 'rv;
        }
        env.cursor = v2;
        if !env.next() || !env.go_out_grouping(V) {
            break 'rv;
        }
        env.cursor += 1;
        env.pv = env.cursor;
    }
    env.cursor = v1;
    let v3 = env.cursor;
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
    env.cursor = v3;
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
            3 => env.slice_from("y"),
            4 => env.slice_from("ë"),
            5 => env.slice_from("ï"),
            6 => env.slice_del(),
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

fn r1(env: &Env) -> bool {
    env.p1 <= env.cursor
}

fn r2(env: &Env) -> bool {
    env.p2 <= env.cursor
}

/// `[ 'ic' ]` then delete in R2, else rewrite to `iqU`. Restores the cursor
/// when "ic" is absent.
fn ic_tail(env: &mut Env, saved: usize) {
    env.ket = env.cursor;
    if !env.eq_s_b("ic") {
        env.restore_from_end(saved);
        return;
    }
    env.bra = env.cursor;
    if r2(env) {
        env.slice_del();
    } else {
        env.slice_from("iqU");
    }
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
            ic_tail(env, v1);
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
            env.slice_from("ent");
        }
        6 => {
            if !rv(env) {
                return false;
            }
            env.slice_del();
            let v3 = env.from_end();
            'opt: {
                env.ket = env.cursor;
                let var = env.find_among_b(AFTER_EMENT);
                if var == 0 {
                    env.restore_from_end(v3);
                    break 'opt;
                }
                env.bra = env.cursor;
                match var {
                    1 => {
                        if !r2(env) {
                            env.restore_from_end(v3);
                            break 'opt;
                        }
                        env.slice_del();
                        env.ket = env.cursor;
                        if !env.eq_s_b("at") {
                            env.restore_from_end(v3);
                            break 'opt;
                        }
                        env.bra = env.cursor;
                        if !r2(env) {
                            env.restore_from_end(v3);
                            break 'opt;
                        }
                        env.slice_del();
                    }
                    2 => {
                        if r2(env) {
                            env.slice_del();
                        } else if r1(env) {
                            env.slice_from("eux");
                        } else {
                            env.restore_from_end(v3);
                        }
                    }
                    3 => {
                        if !r2(env) {
                            env.restore_from_end(v3);
                            break 'opt;
                        }
                        env.slice_del();
                    }
                    _ => {
                        if !rv(env) {
                            env.restore_from_end(v3);
                            break 'opt;
                        }
                        env.slice_from("i");
                    }
                }
            }
        }
        7 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v5 = env.from_end();
            env.ket = env.cursor;
            match env.find_among_b(AFTER_ITE) {
                0 => env.restore_from_end(v5),
                1 => {
                    env.bra = env.cursor;
                    if r2(env) {
                        env.slice_del();
                    } else {
                        env.slice_from("abl");
                    }
                }
                2 => {
                    env.bra = env.cursor;
                    if r2(env) {
                        env.slice_del();
                    } else {
                        env.slice_from("iqU");
                    }
                }
                _ => {
                    env.bra = env.cursor;
                    if r2(env) {
                        env.slice_del();
                    } else {
                        env.restore_from_end(v5);
                    }
                }
            }
        }
        8 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v8 = env.from_end();
            'opt: {
                env.ket = env.cursor;
                if !env.eq_s_b("at") {
                    env.restore_from_end(v8);
                    break 'opt;
                }
                env.bra = env.cursor;
                if !r2(env) {
                    env.restore_from_end(v8);
                    break 'opt;
                }
                env.slice_del();
                ic_tail(env, v8);
            }
        }
        9 => env.slice_from("eau"),
        10 => {
            if !r1(env) {
                return false;
            }
            env.slice_from("al");
        }
        11 => {
            if !env.in_grouping_b(OUX_ENDING) {
                return false;
            }
            env.slice_from("ou");
        }
        12 => {
            if r2(env) {
                env.slice_del();
            } else if r1(env) {
                env.slice_from("eux");
            } else {
                return false;
            }
        }
        13 => {
            if !r1(env) || !env.out_grouping_b(V) {
                return false;
            }
            env.slice_del();
        }
        14 => {
            if !rv(env) {
                return false;
            }
            env.slice_from("ant");
            return false;
        }
        15 => {
            if !rv(env) {
                return false;
            }
            env.slice_from("ent");
            return false;
        }
        _ => {
            let v11 = env.from_end();
            if !env.in_grouping_b(V) || !rv(env) {
                return false;
            }
            env.restore_from_end(v11);
            env.slice_del();
            return false;
        }
    }
    true
}

fn i_verb_suffix(env: &mut Env) -> bool {
    if env.cursor < env.pv {
        return false;
    }
    let saved_lb = env.limit_backward;
    env.limit_backward = env.pv;
    let ok = 'body: {
        env.ket = env.cursor;
        if env.find_among_b(I_VERB) == 0 {
            break 'body false;
        }
        env.bra = env.cursor;
        if env.eq_c_b('H') {
            break 'body false;
        }
        if !env.out_grouping_b(V) {
            break 'body false;
        }
        env.slice_del();
        true
    };
    env.limit_backward = saved_lb;
    ok
}

fn verb_suffix(env: &mut Env) -> bool {
    if env.cursor < env.pv {
        return false;
    }
    let saved_lb = env.limit_backward;
    env.limit_backward = env.pv;
    env.ket = env.cursor;
    let var = env.find_among_b(VERB);
    if var == 0 {
        env.limit_backward = saved_lb;
        return false;
    }
    env.bra = env.cursor;
    env.limit_backward = saved_lb;
    match var {
        1 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
        }
        2 => env.slice_del(),
        3 => {
            let v3 = env.from_end();
            if env.eq_c_b('e') && rv(env) {
                env.bra = env.cursor;
            } else {
                env.restore_from_end(v3);
            }
            env.slice_del();
        }
        _ => {
            let v4 = env.from_end();
            let var = env.find_among_b(AISE_GUARD);
            if var != 0 {
                if var != 1 {
                    return false;
                }
                if env.prev() && env.at_limit_backward() {
                    return false;
                }
            }
            env.restore_from_end(v4);
            env.slice_del();
        }
    }
    true
}

fn residual_suffix(env: &mut Env) -> bool {
    let v1 = env.from_end();
    'plural: {
        env.ket = env.cursor;
        if !env.eq_c_b('s') {
            env.restore_from_end(v1);
            break 'plural;
        }
        env.bra = env.cursor;
        let v2 = env.from_end();
        if !env.eq_s_b("Hi") && !env.out_grouping_b(KEEP_WITH_S) {
            env.restore_from_end(v1);
            break 'plural;
        }
        env.restore_from_end(v2);
        env.slice_del();
    }
    if env.cursor < env.pv {
        return false;
    }
    let saved_lb = env.limit_backward;
    env.limit_backward = env.pv;
    let ok = 'body: {
        env.ket = env.cursor;
        let var = env.find_among_b(RESIDUAL);
        if var == 0 {
            break 'body false;
        }
        env.bra = env.cursor;
        match var {
            1 => {
                if !r2(env) {
                    break 'body false;
                }
                if !env.eq_c_b('s') && !env.eq_c_b('t') {
                    break 'body false;
                }
                env.slice_del();
            }
            2 => env.slice_from("i"),
            _ => env.slice_del(),
        }
        true
    };
    env.limit_backward = saved_lb;
    ok
}

fn un_double(env: &mut Env) -> bool {
    let v1 = env.from_end();
    if env.find_among_b(UNDOUBLE) == 0 {
        return false;
    }
    env.restore_from_end(v1);
    env.ket = env.cursor;
    if !env.prev() {
        return false;
    }
    env.bra = env.cursor;
    env.slice_del();
    true
}

fn un_accent(env: &mut Env) -> bool {
    let mut consonants = 0;
    while env.out_grouping_b(V) {
        consonants += 1;
    }
    if consonants == 0 {
        return false;
    }
    env.ket = env.cursor;
    if !env.eq_c_b('é') && !env.eq_c_b('è') {
        return false;
    }
    env.bra = env.cursor;
    env.slice_from("e");
    true
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
    let v4 = env.from_end();
    let v6 = env.from_end();
    let suffix_removed = standard_suffix(env) || {
        env.restore_from_end(v6);
        i_verb_suffix(env)
    } || {
        env.restore_from_end(v6);
        verb_suffix(env)
    };
    if suffix_removed {
        env.restore_from_end(v4);
        let v7 = env.from_end();
        env.ket = env.cursor;
        if env.eq_c_b('Y') {
            env.bra = env.cursor;
            env.slice_from("i");
        } else {
            env.restore_from_end(v7);
            if env.eq_c_b('ç') {
                env.bra = env.cursor;
                env.slice_from("c");
            } else {
                env.restore_from_end(v7);
            }
        }
    } else {
        env.restore_from_end(v4);
        residual_suffix(env);
    }
    env.restore_from_end(v3);

    let v9 = env.from_end();
    un_double(env);
    env.restore_from_end(v9);
    let v10 = env.from_end();
    un_accent(env);
    env.restore_from_end(v10);

    env.cursor = env.limit_backward;
    let v11 = env.cursor;
    postlude(env);
    env.cursor = v11;
}
