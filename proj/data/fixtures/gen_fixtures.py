#!/usr/bin/env python3
"""Deterministic generator for the bundled test fixtures.

Writes fixture_corpus.txt (pre-tokenized, one document per line),
fixture_wordlist.txt, fixture_lexicon.tsv and fixture_questions.txt into the
directory containing this script. Rerunning reproduces the same bytes.
"""

import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
rng = random.Random(20240817)

FUNCTION = ["的", "是", "在", "有", "和", "了", "很"]
HE, SHE = "他", "她"
MALE = ["国王", "王子", "将军", "勇士", "工程师", "司机", "战士",
        "男人", "父亲", "哥哥", "叔叔"]
FEMALE = ["女王", "公主", "舞者", "护士", "教师", "歌手", "女人",
          "母亲", "姐姐", "阿姨", "裙子"]
NEUTRAL = ["苹果", "香蕉", "山脉", "河流", "城市", "乡村", "天空", "大地",
           "书本", "学校", "电脑", "手机", "音乐", "电影", "食物", "茶叶"]
REDUP_BASE = ["高", "大", "红", "白", "小", "长"]
REDUP = [w + w for w in REDUP_BASE]
SHARED = ["木桌", "木椅", "石墙", "铁路"]
OOV_WORDS = ["龙虾", "雪豹"]          # in the wordlist, never in the corpus
LEXICON_ONLY = ["企鹅"]               # in the lexicon, nowhere else

GENDER_PAIRS = [("国王", "女王"), ("王子", "公主"), ("男人", "女人"),
                ("父亲", "母亲"), ("哥哥", "姐姐"), ("叔叔", "阿姨")]


def gendered_sentence(pronoun, topic):
    words = [pronoun, rng.choice(FUNCTION), rng.choice(topic),
             rng.choice(FUNCTION), rng.choice(topic), pronoun,
             rng.choice(NEUTRAL), rng.choice(FUNCTION), rng.choice(topic)]
    if rng.random() < 0.5:
        words += [rng.choice(NEUTRAL), rng.choice(FUNCTION), pronoun]
    return words


def neutral_sentence():
    words = [rng.choice(NEUTRAL), rng.choice(FUNCTION), rng.choice(NEUTRAL),
             rng.choice(FUNCTION), rng.choice(NEUTRAL), rng.choice(SHARED),
             rng.choice(FUNCTION), rng.choice(NEUTRAL)]
    return words


def redup_sentence():
    i = rng.randrange(len(REDUP_BASE))
    base, dup = REDUP_BASE[i], REDUP[i]
    return [rng.choice(NEUTRAL), "很", base, rng.choice(FUNCTION),
            rng.choice(NEUTRAL), dup, rng.choice(FUNCTION),
            rng.choice(SHARED), base]


def two_topic_corpus():
    """6 single-character words in two disjoint topics; sentences never mix
    topics, so within-topic cosine must beat cross-topic cosine after
    training."""
    r = random.Random(61004)
    topics = [["甲", "乙", "丙"], ["丁", "戊", "己"]]
    lines = []
    for i in range(5000):
        topic = topics[i % 2]
        lines.append(" ".join(r.choice(topic) for _ in range(8)))
    with open(os.path.join(HERE, "fixture_two_topic.txt"), "w",
              encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def shared_char_corpus():
    """Four target words with byte-identical context distributions. 木桌/木椅
    share the character 木; the control pair 石墙/铁路 shares nothing, so only
    character-aware training can tell the pairs apart."""
    r = random.Random(61005)
    targets = ["木桌", "木椅", "石墙", "铁路"]
    fillers = ["的", "是", "在", "有"]
    lines = []
    for _ in range(600):
        ca, cb = r.choice(fillers), r.choice(fillers)
        for t in targets:
            lines.append(" ".join([ca, t, cb, t, ca]))
    r.shuffle(lines)
    with open(os.path.join(HERE, "fixture_shared_char.txt"), "w",
              encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def main():
    lines = []
    for i in range(9000):
        roll = i % 10
        if roll < 2:
            lines.append(gendered_sentence(HE, MALE))
        elif roll < 4:
            lines.append(gendered_sentence(SHE, FEMALE))
        elif roll < 7:
            lines.append(neutral_sentence())
        else:
            lines.append(redup_sentence())
    rng.shuffle(lines)
    with open(os.path.join(HERE, "fixture_corpus.txt"), "w",
              encoding="utf-8") as f:
        f.write("\n".join(" ".join(ws) for ws in lines) + "\n")

    wordlist = MALE + FEMALE + NEUTRAL + REDUP_BASE + SHARED + OOV_WORDS
    assert len(wordlist) == 50, len(wordlist)
    with open(os.path.join(HERE, "fixture_wordlist.txt"), "w",
              encoding="utf-8") as f:
        f.write("\n".join(wordlist) + "\n")

    lexicon = []
    for w in MALE:
        lexicon.append((w, f"{rng.uniform(3.6, 4.8):.2f}"))
    for w in FEMALE:
        lexicon.append((w, f"{rng.uniform(1.2, 2.4):.2f}"))
    neutral_scores = iter(["3", "3.0", "3.00", "3.0"])
    for k, w in enumerate(NEUTRAL):
        if k % 4 == 0:
            lexicon.append((w, next(neutral_scores)))
        else:
            lexicon.append((w, f"{rng.uniform(2.5, 3.5):.2f}"))
    for w in REDUP_BASE + SHARED:
        lexicon.append((w, f"{rng.uniform(1.8, 4.2):.2f}"))
    for w in OOV_WORDS + LEXICON_ONLY:
        lexicon.append((w, f"{rng.uniform(1.5, 4.5):.2f}"))
    assert len(lexicon) == 51
    with open(os.path.join(HERE, "fixture_lexicon.tsv"), "w",
              encoding="utf-8") as f:
        f.write("word\tscore\n")
        f.write("\n".join(f"{w}\t{s}" for w, s in lexicon) + "\n")

    questions = [": morphological/reduplication-A"]
    for i, (a, aa) in enumerate(zip(REDUP_BASE, REDUP)):
        for j, (b, bb) in enumerate(zip(REDUP_BASE, REDUP)):
            if i != j:
                questions.append(f"{a} {aa} {b} {bb}")
    questions.append(": semantic/gender-pairs")
    for i, (a, b) in enumerate(GENDER_PAIRS):
        for j, (c, d) in enumerate(GENDER_PAIRS):
            if i != j:
                questions.append(f"{a} {b} {c} {d}")
    questions.append(": semantic/out-of-vocabulary")
    questions.append("国王 女王 龙虾 雪豹")
    questions.append("企鹅 国王 女王 王子")
    with open(os.path.join(HERE, "fixture_questions.txt"), "w",
              encoding="utf-8") as f:
        f.write("\n".join(questions) + "\n")

    two_topic_corpus()
    shared_char_corpus()


if __name__ == "__main__":
    main()
