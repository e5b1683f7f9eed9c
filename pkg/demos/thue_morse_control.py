"""Negative control: the Thue-Morse word contains abelian squares, and the decision finds one."""

from abelfree.cli import load_morphism
from abelfree.templates import decide, trivial_template

h, _ = load_morphism("thue_morse")
dec = decide(trivial_template(2, 2), h)
r = dec.witness
word = "".join(h.source.letters[i] for i in r.word)
(a, b), (c, e) = r.blocks
print("verdict:", dec.verdict)
print("witness:", word, "blocks", word[a:b], word[c:e])
print("lifted through", len(dec.witness_chain) - 1, "parent steps:",
      " -> ".join("".join(map(str, x.word)) for x in dec.witness_chain))
