//! English ("Porter2") Snowball stemmer.

use super::env::{among, Among, Env};

const V: &str = "aeiouy";
const V_WXY: &str = "Yaeiouwxy";
const VALID_LI: &str = "cdeghkmnrt";
const AEO: &str = "aeo";

const PREFIX_EXCEPTIONS: &[Among] = &[
    among("arsen", -1),
    among("commun", -1),
    among("emerg", -1),
    among("gener", -1),
    among("inter", -1),
    among("later", -1),
    among("organ", -1),
    among("past", -1),
    among("univers", -1),
];

const APOSTROPHE: &[Among] = &[among("'", 1), among("'s'", 1), among("'s", 1)];

const STEP_1A: &[Among] = &[
    among("ied", 2),
    among("s", 3),
    among("ies", 2),
    among("sses", 1),
    among("ss", -1),
    among("us", -1),
];

const EED_EXCEPTIONS: &[Among] = &[among("succ", 1), among("proc", 1), among("exc", 1)];

const ING_EXCEPTIONS: &[Among] = &[
    among("even", 2),
    among("cann", 2),
    among("inn", 2),
    among("earr", 2),
    among("herr", 2),
    among("out", 2),
    among("y", 1),
];

const STEP_1B: &[Among] = &[
    among("", -1),
    among("ed", 2),
    among("eed", 1),
    among("ing", 3),
    among("edly", 2),
    among("eedly", 1),
    among("ingly", 2),
];

const STEP_1B_TIDY: &[Among] = &[
    among("", 3),
    among("bb", 2),
    among("dd", 2),
    among("ff", 2),
    among("gg", 2),
    among("bl", 1),
    among("mm", 2),
    among("nn", 2),
    among("pp", 2),
    among("rr", 2),
    among("at", 1),
    among("tt", 2),
    among("iz", 1),
];

const STEP_2: &[Among] = &[
    among("anci", 3),
    among("enci", 2),
    among("ogi", 14),
    among("li", 16),
    among("bli", 12),
    among("abli", 4),
    among("alli", 8),
    among("fulli", 9),
    among("lessli", 15),
    among("ousli", 10),
    among("entli", 5),
    among("aliti", 8),
    among("biliti", 12),
    among("iviti", 11),
    among("tional", 1),
    among("ational", 7),
    among("alism", 8),
    among("ation", 7),
    among("ization", 6),
    among("izer", 6),
    among("ator", 7),
    among("iveness", 11),
    among("fulness", 9),
    among("ousness", 10),
    among("ogist", 13),
];

const STEP_3: &[Among] = &[
    among("icate", 4),
    among("ative", 6),
    among("alize", 3),
    among("iciti", 4),
    among("ical", 4),
    among("tional", 1),
    among("ational", 2),
    among("ful", 5),
    among("ness", 5),
];

const STEP_4: &[Among] = &[
    among("ic", 1),
    among("ance", 1),
    among("ence", 1),
    among("able", 1),
    among("ible", 1),
    among("ate", 1),
    among("ive", 1),
    among("ize", 1),
    among("iti", 1),
    among("al", 1),
    among("ism", 1),
    among("ion", 2),
    among("er", 1),
    among("ous", 1),
    among("ant", 1),
    among("ent", 1),
    among("ment", 1),
    among("ement", 1),
];

const STEP_5: &[Among] = &[among("e", 1), among("l", 2)];

const WORD_EXCEPTIONS: &[Among] = &[
    among("andes", -1),
    among("atlas", -1),
    among("bias", -1),
    among("cosmos", -1),
    among("early", 6),
    among("gently", 4),
    among("howe", -1),
    among("idly", 3),
    among("news", -1),
    among("only", 7),
    among("singly", 8),
    among("skies", 2),
    among("skis", 1),
    among("sky", -1),
    among("ugly", 5),
];
const WORD_EXCEPTION_FORMS: [&str; 8] = ["ski", "sky", "idl", "gentl", "ugli", "earli", "onli", "singl"];

fn prelude(env: &mut Env) {
    env.flag = false;
    env.cursor = 0;
    env.bra = 0;
    if env.eq_c('\'') {
        env.ket = env.cursor;
        env.slice_del();
    }
    env.cursor = 0;
    env.bra = 0;
    if env.eq_c('y') {
        env.ket = env.cursor;
        env.slice_from("Y");
        env.flag = true;
    }
    env.cursor = 0;
    // every y after a vowel becomes Y
    loop {
        let mut found = false;
        loop {
            let start = env.cursor;
            if env.in_grouping(V) {
                env.bra = env.cursor;
                if env.eq_c('y') {
                    env.ket = env.cursor;
                    env.cursor = start;
                    found = true;
                    break;
                }
            }
            env.cursor = start;
            if !env.next() {
                break;
            }
        }
        if !found {
            break;
        }
        env.slice_from("Y");
        env.flag = true;
    }
    env.cursor = 0;
}

fn mark_regions(env: &mut Env) {
    env.p1 = env.limit;
    env.p2 = env.limit;
    let start = env.cursor;
    'regions: {
        let v2 = env.cursor;
        if env.find_among(PREFIX_EXCEPTIONS) == 0 {
            env.cursor = v2;
            if !env.go_out_grouping(V) {
                break 'regions;
            }
            env.cursor += 1;
            if !env.go_in_grouping(V) {
                break 'regions;
            }
            env.cursor += 1;
        }
        env.p1 = env.cursor;
        if !env.go_out_grouping(V) {
            break 'regions;
        }
        env.cursor += 1;
        if !env.go_in_grouping(V) {
            break 'regions;
        }
        env.cursor += 1;
        env.p2 = env.cursor;
    }
    env.cursor = start;
}

fn short_syllable(env: &mut Env) -> bool {
    let v1 = env.from_end();
    if env.out_grouping_b(V_WXY) && env.in_grouping_b(V) && env.out_grouping_b(V) {
        return true;
    }
    env.restore_from_end(v1);
    if env.out_grouping_b(V) && env.in_grouping_b(V) && env.at_limit_backward() {
        return true;
    }
    env.restore_from_end(v1);
    env.eq_s_b("past")
}

fn r1(env: &Env) -> bool {
    env.p1 <= env.cursor
}

fn r2(env: &Env) -> bool {
    env.p2 <= env.cursor
}

fn step_1a(env: &mut Env) -> bool {
    let v1 = env.from_end();
    env.ket = env.cursor;
    if env.find_among_b(APOSTROPHE) == 0 {
        env.restore_from_end(v1);
    } else {
        env.bra = env.cursor;
        env.slice_del();
    }
    env.ket = env.cursor;
    let var = env.find_among_b(STEP_1A);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    match var {
        1 => env.slice_from("ss"),
        2 => {
            if env.cursor >= env.limit_backward + 2 {
                env.cursor -= 2;
                env.slice_from("i");
            } else {
                env.slice_from("ie");
            }
        }
        3 => {
            if !env.prev() {
                return false;
            }
            if !env.go_out_grouping_b(V) {
                return false;
            }
            env.cursor -= 1;
            env.slice_del();
        }
        _ => {}
    }
    true
}

fn step_1b(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let mut var = env.find_among_b(STEP_1B);
    env.bra = env.cursor;
    let v1 = env.from_end();
    'special: {
        match var {
            1 => {
                let v2 = env.from_end();
                if r1(env) {
                    let v3 = env.from_end();
                    if !(env.find_among_b(EED_EXCEPTIONS) != 0 && env.at_limit_backward()) {
                        env.restore_from_end(v3);
                        env.slice_from("ee");
                    }
                }
                env.restore_from_end(v2);
            }
            2 => break 'special,
            3 => {
                var = env.find_among_b(ING_EXCEPTIONS);
                if var == 0 {
                    break 'special;
                }
                if var == 1 {
                    let v4 = env.from_end();
                    if !env.out_grouping_b(V) || !env.at_limit_backward() {
                        break 'special;
                    }
                    env.restore_from_end(v4);
                    env.bra = env.cursor;
                    env.slice_from("ie");
                } else if !env.at_limit_backward() {
                    break 'special;
                }
            }
            _ => {}
        }
        return true;
    }
    env.restore_from_end(v1);
    let v5 = env.from_end();
    if !env.go_out_grouping_b(V) {
        return false;
    }
    env.cursor -= 1;
    env.restore_from_end(v5);
    env.slice_del();
    env.ket = env.cursor;
    env.bra = env.cursor;
    let v6 = env.from_end();
    match env.find_among_b(STEP_1B_TIDY) {
        1 => {
            env.slice_from("e");
            return false;
        }
        2 => {
            let v7 = env.from_end();
            if env.in_grouping_b(AEO) && env.at_limit_backward() {
                return false;
            }
            env.restore_from_end(v7);
        }
        _ => {
            if env.cursor != env.p1 {
                return false;
            }
            let v8 = env.from_end();
            if !short_syllable(env) {
                return false;
            }
            env.restore_from_end(v8);
            env.slice_from("e");
            return false;
        }
    }
    env.restore_from_end(v6);
    env.ket = env.cursor;
    if !env.prev() {
        return false;
    }
    env.bra = env.cursor;
    env.slice_del();
    true
}

fn step_1c(env: &mut Env) -> bool {
    env.ket = env.cursor;
    if !env.eq_c_b('y') && !env.eq_c_b('Y') {
        return false;
    }
    env.bra = env.cursor;
    if !env.out_grouping_b(V) || env.at_limit_backward() {
        return false;
    }
    env.slice_from("i");
    true
}

fn step_2(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(STEP_2);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    if !r1(env) {
        return false;
    }
    let replacement = match var {
        1 => "tion",
        2 => "ence",
        3 => "ance",
        4 => "able",
        5 => "ent",
        6 => "ize",
        7 => "ate",
        8 => "al",
        9 => "ful",
        10 => "ous",
        11 => "ive",
        12 => "ble",
        13 => "og",
        14 => {
            if !env.eq_c_b('l') {
                return false;
            }
            "og"
        }
        15 => "less",
        _ => {
            if !env.in_grouping_b(VALID_LI) {
                return false;
            }
            ""
        }
    };
    env.slice_from(replacement);
    true
}

fn step_3(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(STEP_3);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    if !r1(env) {
        return false;
    }
    match var {
        1 => env.slice_from("tion"),
        2 => env.slice_from("ate"),
        3 => env.slice_from("al"),
        4 => env.slice_from("ic"),
        5 => env.slice_del(),
        _ => {
            if !r2(env) {
                return false;
            }
            env.slice_del();
        }
    }
    true
}

fn step_4(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(STEP_4);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    if !r2(env) {
        return false;
    }
    if var == 2 && !env.eq_c_b('s') && !env.eq_c_b('t') {
        return false;
    }
    env.slice_del();
    true
}

fn step_5(env: &mut Env) -> bool {
    env.ket = env.cursor;
    let var = env.find_among_b(STEP_5);
    if var == 0 {
        return false;
    }
    env.bra = env.cursor;
    if var == 1 {
        if !r2(env) {
            if !r1(env) {
                return false;
            }
            let v1 = env.from_end();
            if short_syllable(env) {
                return false;
            }
            env.restore_from_end(v1);
        }
        env.slice_del();
    } else {
        if !r2(env) || !env.eq_c_b('l') {
            return false;
        }
        env.slice_del();
    }
    true
}

fn exception1(env: &mut Env) -> bool {
    env.bra = env.cursor;
    let var = env.find_among(WORD_EXCEPTIONS);
    if var == 0 {
        return false;
    }
    env.ket = env.cursor;
    if env.cursor < env.limit {
        return false;
    }
    if var > 0 {
        env.slice_from(WORD_EXCEPTION_FORMS[var as usize - 1]);
    }
    true
}

fn postlude(env: &mut Env) {
    if !env.flag {
        return;
    }
    loop {
        let mut found = false;
        loop {
            let start = env.cursor;
            env.bra = env.cursor;
            if env.eq_c('Y') {
                env.ket = env.cursor;
                env.cursor = start;
                found = true;
                break;
            }
            env.cursor = start;
            if !env.next() {
                break;
            }
        }
        if !found {
            break;
        }
        env.slice_from("y");
    }
}

pub(crate) fn stem(env: &mut Env) {
    let start = env.cursor;
    if exception1(env) {
        return;
    }
    env.cursor = start;
    if env.limit < 3 {
        return;
    }
    prelude(env);
    mark_regions(env);
    env.limit_backward = env.cursor;
    env.cursor = env.limit;

    let steps: [fn(&mut Env) -> bool; 7] =
        [step_1a, step_1b, step_1c, step_2, step_3, step_4, step_5];
    for step in steps {
        let v = env.from_end();
        step(env);
        env.restore_from_end(v);
    }

    env.cursor = env.limit_backward;
    let v = env.cursor;
    postlude(env);
    env.cursor = v;
}
