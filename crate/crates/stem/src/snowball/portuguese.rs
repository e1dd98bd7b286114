//! Portuguese Snowball stemmer.

use super::env::{among, Among, Env};

const V: &str = "aeiouáâéêíóôú";

fn prelude(env: &mut Env) {
    loop {
        let v1 = env.cursor;
        env.bra = env.cursor;
        let var = env.find_among(PRELUDE);
        env.ket = env.cursor;
        match var {
            1 => env.slice_from("a~"),
            2 => env.slice_from("o~"),
            _ => {
                if !env.next() {
                    env.cursor = v1;
                    break;
                }
            }
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
    env.cursor = v1;
}

fn postlude(env: &mut Env) {
    loop {
        let v1 = env.cursor;
        env.bra = env.cursor;
        let var = env.find_among(POSTLUDE);
        env.ket = env.cursor;
        match var {
            1 => env.slice_from("ã"),
            2 => env.slice_from("õ"),
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

fn delete_among_in_r2(env: &mut Env, table: &[Among], saved: usize) -> i32 {
    env.ket = env.cursor;
    let var = env.find_among_b(table);
    if var == 0 {
        env.restore_from_end(saved);
        return 0;
    }
    env.bra = env.cursor;
    if !r2(env) {
        env.restore_from_end(saved);
        return 0;
    }
    env.slice_del();
    var
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
            env.slice_from("log");
        }
        3 => {
            if !r2(env) {
                return false;
            }
            env.slice_from("u");
        }
        4 => {
            if !r2(env) {
                return false;
            }
            env.slice_from("ente");
        }
        5 => {
            if env.p1 > env.cursor {
                return false;
            }
            env.slice_del();
            let v1 = env.from_end();
            if delete_among_in_r2(env, AFTER_AMENTE, v1) == 1 {
                delete_in_r2(env, "at", v1);
            }
        }
        6 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v2 = env.from_end();
            delete_among_in_r2(env, AFTER_ANTE, v2);
        }
        7 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v3 = env.from_end();
            delete_among_in_r2(env, AFTER_IDAD, v3);
        }
        8 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v4 = env.from_end();
            delete_in_r2(env, "at", v4);
        }
        _ => {
            if !rv(env) || !env.eq_c_b('e') {
                return false;
            }
            env.slice_from("ir");
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

fn residual_suffix(env: &mut Env) -> bool {
    env.ket = env.cursor;
    if env.find_among_b(RESIDUAL) == 0 {
        return false;
    }
    env.bra = env.cursor;
    if !rv(env) {
        return false;
    }
    env.slice_del();
    true
}

/// `[x] test y`: marks `x` as the slice when it is preceded by `y`.
fn mark_before(env: &mut Env, x: char, y: char) -> bool {
    if !env.eq_c_b(x) {
        return false;
    }
    env.bra = env.cursor;
    let v = env.from_end();
    if !env.eq_c_b(y) {
        return false;
    }
    env.restore_from_end(v);
    true
}

fn residual_form(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(RESIDUAL_FORM);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    if var != 1 {
        env.slice_from("c");
        return true;
    }
    if !rv(env) {
        return false;
    }
    env.slice_del();
    env.ket = env.cursor;
    let v1 = env.from_end();
    if !mark_before(env, 'u', 'g') {
        env.restore_from_end(v1);
        if !mark_before(env, 'i', 'c') {
            return false;
        }
    }
    if !rv(env) {
        return false;
    }
    env.slice_del();
    true
}

pub(crate) fn stem(env: &mut Env) {
    let v1 = env.cursor;
    prelude(env);
    env.cursor = v1;
    mark_regions(env);
    env.limit_backward = env.cursor;
    env.cursor = env.limit;
    let v2 = env.from_end();
    let v4 = env.from_end();
    let suffix_removed = standard_suffix(env) || {
        env.restore_from_end(v4);
        verb_suffix(env)
    };
    if suffix_removed {
        env.restore_from_end(v4);
        let v6 = env.from_end();
        env.ket = env.cursor;
        if mark_before(env, 'i', 'c') && rv(env) {
            env.slice_del();
        }
        env.restore_from_end(v6);
    } else {
        env.restore_from_end(v2);
        residual_suffix(env);
    }
    env.restore_from_end(v2);
    let v8 = env.from_end();
    residual_form(env);
    env.restore_from_end(v8);
    env.cursor = env.limit_backward;
    let v9 = env.cursor;
    postlude(env);
    env.cursor = v9;
}

const PRELUDE: &[Among] = &[
    among("", 3),
    among("ã", 1),
    among("õ", 2),
];
const POSTLUDE: &[Among] = &[
    among("", 3),
    among("a~", 1),
    among("o~", 2),
];
const AFTER_AMENTE: &[Among] = &[
    among("ic", -1),
    among("ad", -1),
    among("os", -1),
    among("iv", 1),
];
const AFTER_ANTE: &[Among] = &[
    among("ante", 1),
    among("avel", 1),
    among("ível", 1),
];
const AFTER_IDAD: &[Among] = &[
    among("ic", 1),
    among("abil", 1),
    among("iv", 1),
];
const STANDARD: &[Among] = &[
    among("ica", 1),
    among("ância", 1),
    among("ência", 4),
    among("logia", 2),
    among("ira", 9),
    among("adora", 1),
    among("osa", 1),
    among("ista", 1),
    among("iva", 8),
    among("eza", 1),
    among("idade", 7),
    among("ante", 1),
    among("mente", 6),
    among("amente", 5),
    among("ável", 1),
    among("ível", 1),
    among("ico", 1),
    among("ismo", 1),
    among("oso", 1),
    among("amento", 1),
    among("imento", 1),
    among("ivo", 8),
    among("aça~o", 1),
    among("uça~o", 3),
    among("ador", 1),
    among("icas", 1),
    among("ências", 4),
    among("logias", 2),
    among("iras", 9),
    among("adoras", 1),
    among("osas", 1),
    among("istas", 1),
    among("ivas", 8),
    among("ezas", 1),
    among("idades", 7),
    among("adores", 1),
    among("antes", 1),
    among("aço~es", 1),
    among("uço~es", 3),
    among("icos", 1),
    among("ismos", 1),
    among("osos", 1),
    among("amentos", 1),
    among("imentos", 1),
    among("ivos", 8),
];
const VERB: &[Among] = &[
    among("ada", 1),
    among("ida", 1),
    among("ia", 1),
    among("aria", 1),
    among("eria", 1),
    among("iria", 1),
    among("ara", 1),
    among("era", 1),
    among("ira", 1),
    among("ava", 1),
    among("asse", 1),
    among("esse", 1),
    among("isse", 1),
    among("aste", 1),
    among("este", 1),
    among("iste", 1),
    among("ei", 1),
    among("arei", 1),
    among("erei", 1),
    among("irei", 1),
    among("am", 1),
    among("iam", 1),
    among("ariam", 1),
    among("eriam", 1),
    among("iriam", 1),
    among("aram", 1),
    among("eram", 1),
    among("iram", 1),
    among("avam", 1),
    among("em", 1),
    among("arem", 1),
    among("erem", 1),
    among("irem", 1),
    among("assem", 1),
    among("essem", 1),
    among("issem", 1),
    among("ado", 1),
    among("ido", 1),
    among("ando", 1),
    among("endo", 1),
    among("indo", 1),
    among("ara~o", 1),
    among("era~o", 1),
    among("ira~o", 1),
    among("ar", 1),
    among("er", 1),
    among("ir", 1),
    among("as", 1),
    among("adas", 1),
    among("idas", 1),
    among("ias", 1),
    among("arias", 1),
    among("erias", 1),
    among("irias", 1),
    among("aras", 1),
    among("eras", 1),
    among("iras", 1),
    among("avas", 1),
    among("es", 1),
    among("ardes", 1),
    among("erdes", 1),
    among("irdes", 1),
    among("ares", 1),
    among("eres", 1),
    among("ires", 1),
    among("asses", 1),
    among("esses", 1),
    among("isses", 1),
    among("astes", 1),
    among("estes", 1),
    among("istes", 1),
    among("is", 1),
    among("ais", 1),
    among("eis", 1),
    among("areis", 1),
    among("ereis", 1),
    among("ireis", 1),
    among("áreis", 1),
    among("éreis", 1),
    among("íreis", 1),
    among("ásseis", 1),
    among("ésseis", 1),
    among("ísseis", 1),
    among("áveis", 1),
    among("íeis", 1),
    among("aríeis", 1),
    among("eríeis", 1),
    among("iríeis", 1),
    among("ados", 1),
    among("idos", 1),
    among("amos", 1),
    among("áramos", 1),
    among("éramos", 1),
    among("íramos", 1),
    among("ávamos", 1),
    among("íamos", 1),
    among("aríamos", 1),
    among("eríamos", 1),
    among("iríamos", 1),
    among("emos", 1),
    among("aremos", 1),
    among("eremos", 1),
    among("iremos", 1),
    among("ássemos", 1),
    among("êssemos", 1),
    among("íssemos", 1),
    among("imos", 1),
    among("armos", 1),
    among("ermos", 1),
    among("irmos", 1),
    among("ámos", 1),
    among("arás", 1),
    among("erás", 1),
    among("irás", 1),
    among("eu", 1),
    among("iu", 1),
    among("ou", 1),
    among("ará", 1),
    among("erá", 1),
    among("irá", 1),
];
const RESIDUAL: &[Among] = &[
    among("a", 1),
    among("i", 1),
    among("o", 1),
    among("os", 1),
    among("á", 1),
    among("í", 1),
    among("ó", 1),
];
const RESIDUAL_FORM: &[Among] = &[
    among("e", 1),
    among("ç", 2),
    among("é", 1),
    among("ê", 1),
];
