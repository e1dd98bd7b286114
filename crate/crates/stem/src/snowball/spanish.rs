//! Spanish Snowball stemmer.

use super::env::{among, Among, Env};

const V: &str = "aeiouáéíóúü";

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
            1 => env.slice_from("a"),
            2 => env.slice_from("e"),
            3 => env.slice_from("i"),
            4 => env.slice_from("o"),
            5 => env.slice_from("u"),
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
    let replacement = match var {
        1 => "iendo",
        2 => "ando",
        3 => "ar",
        4 => "er",
        5 => "ir",
        6 => {
            env.slice_del();
            return true;
        }
        _ => {
            if !env.eq_c_b('u') {
                return false;
            }
            env.slice_del();
            return true;
        }
    };
    env.bra = env.cursor;
    env.slice_from(replacement);
    true
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
            if env.p1 > env.cursor {
                return false;
            }
            env.slice_del();
            let v2 = env.from_end();
            if delete_among_in_r2(env, AFTER_AMENTE, v2) == 1 {
                delete_in_r2(env, "at", v2);
            }
        }
        7 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v3 = env.from_end();
            delete_among_in_r2(env, AFTER_ANTE, v3);
        }
        8 => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v4 = env.from_end();
            delete_among_in_r2(env, AFTER_IDAD, v4);
        }
        _ => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
            let v5 = env.from_end();
            delete_in_r2(env, "at", v5);
        }
    }
    true
}

fn y_verb_suffix(env: &mut Env) -> bool {
    if env.cursor < env.pv {
        return false;
    }
    let saved_lb = env.limit_backward;
    env.limit_backward = env.pv;
    env.ket = env.cursor;
    if env.find_among_b(Y_VERB) == 0 {
        env.limit_backward = saved_lb;
        return false;
    }
    env.bra = env.cursor;
    env.limit_backward = saved_lb;
    if !env.eq_c_b('u') {
        return false;
    }
    env.slice_del();
    true
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
    if var == 1 {
        // "gu" + suffix also drops the u
        let v3 = env.from_end();
        if env.eq_c_b('u') {
            let v4 = env.from_end();
            if env.eq_c_b('g') {
                env.restore_from_end(v4);
            } else {
                env.restore_from_end(v3);
            }
        } else {
            env.restore_from_end(v3);
        }
        env.bra = env.cursor;
    }
    env.slice_del();
    true
}

fn residual_suffix(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(RESIDUAL);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    if !rv(env) {
        return false;
    }
    env.slice_del();
    if var != 1 {
        let v1 = env.from_end();
        'gu: {
            env.ket = env.cursor;
            if !env.eq_c_b('u') {
                env.restore_from_end(v1);
                break 'gu;
            }
            env.bra = env.cursor;
            let v2 = env.from_end();
            if !env.eq_c_b('g') {
                env.restore_from_end(v1);
                break 'gu;
            }
            env.restore_from_end(v2);
            if !rv(env) {
                env.restore_from_end(v1);
                break 'gu;
            }
            env.slice_del();
        }
    }
    true
}

pub(crate) fn stem(env: &mut Env) {
    mark_regions(env);
    env.limit_backward = env.cursor;
    env.cursor = env.limit;
    let v1 = env.from_end();
    attached_pronoun(env);
    env.restore_from_end(v1);
    let v2 = env.from_end();
    if !standard_suffix(env) {
        env.restore_from_end(v2);
        if !y_verb_suffix(env) {
            env.restore_from_end(v2);
            verb_suffix(env);
        }
    }
    env.restore_from_end(v2);
    let v4 = env.from_end();
    residual_suffix(env);
    env.restore_from_end(v4);
    env.cursor = env.limit_backward;
    let v5 = env.cursor;
    postlude(env);
    env.cursor = v5;
}

const POSTLUDE: &[Among] = &[
    among("", 6),
    among("á", 1),
    among("é", 2),
    among("í", 3),
    among("ó", 4),
    among("ú", 5),
];
const PRONOUNS: &[Among] = &[
    among("la", -1),
    among("sela", -1),
    among("le", -1),
    among("me", -1),
    among("se", -1),
    among("lo", -1),
    among("selo", -1),
    among("las", -1),
    among("selas", -1),
    among("les", -1),
    among("los", -1),
    among("selos", -1),
    among("nos", -1),
];
const PRONOUN_HOSTS: &[Among] = &[
    among("ando", 6),
    among("iendo", 6),
    among("yendo", 7),
    among("ándo", 2),
    among("iéndo", 1),
    among("ar", 6),
    among("er", 6),
    among("ir", 6),
    among("ár", 3),
    among("ér", 4),
    among("ír", 5),
];
const AFTER_AMENTE: &[Among] = &[
    among("ic", -1),
    among("ad", -1),
    among("os", -1),
    among("iv", 1),
];
const AFTER_ANTE: &[Among] = &[
    among("able", 1),
    among("ible", 1),
    among("ante", 1),
];
const AFTER_IDAD: &[Among] = &[
    among("ic", 1),
    among("abil", 1),
    among("iv", 1),
];
const STANDARD: &[Among] = &[
    among("ica", 1),
    among("ancia", 2),
    among("encia", 5),
    among("adora", 2),
    among("osa", 1),
    among("ista", 1),
    among("iva", 9),
    among("anza", 1),
    among("logía", 3),
    among("idad", 8),
    among("able", 1),
    among("ible", 1),
    among("ante", 2),
    among("mente", 7),
    among("amente", 6),
    among("acion", 2),
    among("ucion", 4),
    among("ación", 2),
    among("ución", 4),
    among("ico", 1),
    among("ismo", 1),
    among("oso", 1),
    among("amiento", 1),
    among("imiento", 1),
    among("ivo", 9),
    among("ador", 2),
    among("icas", 1),
    among("ancias", 2),
    among("encias", 5),
    among("adoras", 2),
    among("osas", 1),
    among("istas", 1),
    among("ivas", 9),
    among("anzas", 1),
    among("logías", 3),
    among("idades", 8),
    among("ables", 1),
    among("ibles", 1),
    among("aciones", 2),
    among("uciones", 4),
    among("adores", 2),
    among("antes", 2),
    among("icos", 1),
    among("ismos", 1),
    among("osos", 1),
    among("amientos", 1),
    among("imientos", 1),
    among("ivos", 9),
];
const Y_VERB: &[Among] = &[
    among("ya", 1),
    among("ye", 1),
    among("yan", 1),
    among("yen", 1),
    among("yeron", 1),
    among("yendo", 1),
    among("yo", 1),
    among("yas", 1),
    among("yes", 1),
    among("yais", 1),
    among("yamos", 1),
    among("yó", 1),
];
const VERB: &[Among] = &[
    among("aba", 2),
    among("ada", 2),
    among("ida", 2),
    among("ara", 2),
    among("iera", 2),
    among("ía", 2),
    among("aría", 2),
    among("ería", 2),
    among("iría", 2),
    among("ad", 2),
    among("ed", 2),
    among("id", 2),
    among("ase", 2),
    among("iese", 2),
    among("aste", 2),
    among("iste", 2),
    among("an", 2),
    among("aban", 2),
    among("aran", 2),
    among("ieran", 2),
    among("ían", 2),
    among("arían", 2),
    among("erían", 2),
    among("irían", 2),
    among("en", 1),
    among("asen", 2),
    among("iesen", 2),
    among("aron", 2),
    among("ieron", 2),
    among("arán", 2),
    among("erán", 2),
    among("irán", 2),
    among("ado", 2),
    among("ido", 2),
    among("ando", 2),
    among("iendo", 2),
    among("ar", 2),
    among("er", 2),
    among("ir", 2),
    among("as", 2),
    among("abas", 2),
    among("adas", 2),
    among("idas", 2),
    among("aras", 2),
    among("ieras", 2),
    among("ías", 2),
    among("arías", 2),
    among("erías", 2),
    among("irías", 2),
    among("es", 1),
    among("ases", 2),
    among("ieses", 2),
    among("abais", 2),
    among("arais", 2),
    among("ierais", 2),
    among("íais", 2),
    among("aríais", 2),
    among("eríais", 2),
    among("iríais", 2),
    among("aseis", 2),
    among("ieseis", 2),
    among("asteis", 2),
    among("isteis", 2),
    among("áis", 2),
    among("éis", 1),
    among("aréis", 2),
    among("eréis", 2),
    among("iréis", 2),
    among("ados", 2),
    among("idos", 2),
    among("amos", 2),
    among("ábamos", 2),
    among("áramos", 2),
    among("iéramos", 2),
    among("íamos", 2),
    among("aríamos", 2),
    among("eríamos", 2),
    among("iríamos", 2),
    among("emos", 1),
    among("aremos", 2),
    among("eremos", 2),
    among("iremos", 2),
    among("ásemos", 2),
    among("iésemos", 2),
    among("imos", 2),
    among("arás", 2),
    among("erás", 2),
    among("irás", 2),
    among("ís", 2),
    among("ará", 2),
    among("erá", 2),
    among("irá", 2),
    among("aré", 2),
    among("eré", 2),
    among("iré", 2),
    among("ió", 2),
];
const RESIDUAL: &[Among] = &[
    among("a", 1),
    among("e", 2),
    among("o", 1),
    among("os", 1),
    among("á", 1),
    among("é", 2),
    among("í", 1),
    among("ó", 1),
];
