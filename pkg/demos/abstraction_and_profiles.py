"""
From a broken line to a repair class
====================================

Walks one buggy/fixed pair through abstraction, diffing and profile mining.
"""

from compfix.corpus import TrainPair, edit_script, mine_pair
from compfix.lang import abstract_program, tokenize

# a for-header with commas where semicolons belong
source = """int main() {
    int i, total = 0;
    for (i = 0, i < 5, i++) {
        total = total + i;
    }
    return 0;
}"""
target = source.replace("i = 0, i < 5, i++", "i = 0; i < 5; i++")

# lexing keeps each token's column
print([t.lexeme for t in tokenize("    for (i = 0, i < 5, i++) {")])

# abstraction replaces names and literals with type tags
line = abstract_program(source)[2]
print(" ".join(line.tags))

# the minimal edit script between abstract source and target
pair = TrainPair(source, target, "E6", 2)
mined = mine_pair(pair)
for op, pos, tag in edit_script(mined.line, mined.target):
    if op != "=":
        print(op, pos, tag)

# what to do (class) and where (profile)
print(mined.repair_class, mined.repair_class.kind)
print(sorted(mined.profile))
