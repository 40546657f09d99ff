import json, os

FIX = "/root/proj/tests/fixtures"

tasks = [
    {"id": "t1", "statement": "Compute the alpha value from stdin.", "difficulty": "easy"},
    {"id": "t2", "statement": "Compute the bravo value from stdin.", "difficulty": "easy"},
    {"id": "t3", "statement": "Compute the charlie value from stdin.", "difficulty": "medium"},
    {"id": "t4", "statement": "Compute the delta value from stdin.", "difficulty": "medium"},
    {"id": "t5", "statement": "Compute the echo value from stdin.", "difficulty": "hard"},
]
with open(f"{FIX}/toy_tasks.jsonl", "w") as f:
    for t in tasks:
        f.write(json.dumps(t) + "\n")

def code(marker, right, texture=""):
    tag = "# RIGHT" if right else "# wrong"
    body = f'print("{marker}")  {tag}'
    if texture:
        body += f"\n# {texture}"
    return body

def gen(c):  # fenced generation/regeneration response
    return f"Here is my solution.\n```python\n{c}\n```"

def fb(action, critique):
    return f"<critique>\n{critique}\n</critique>\n<suggestion>\n{action}\n</suggestion>"

codes = {
    "A0": code("A0", True),
    "A1": code("A1", False),
    "B0": code("B0", False),
    "B1": code("B1", True, "small tweak"),
    "C0": code("C0", False),
    "C1": code("C1", False, "small tweak"),
    "C2": code("C2", False, "small tweak"),
    "C3": code("C3", False, "small tweak"),
    "C4": code("C4", True, "new approach"),
    "Calt": code("Calt", True),
    "D0": code("D0", False),
    "D1": code("D1", False, "small tweak"),
    "D2": code("D2", False, "small tweak"),
    "D3": code("D3", False, "small tweak"),
    "D4": code("D4", False, "small tweak"),
    "D5": code("D5", True, "new approach"),
    "E0": code("E0", True),
    "E1": code("E1", False, "small tweak"),
}


GLUE = ('\n\n## Note:\n1. Your feedback should consist of two parts: critique and '
        'suggestion. In the critique, you should analyze the code and provide specific '
        'recommendations. In the suggestion, you should clarify the direction for the '
        'next steps.\n2. Your suggestion should be one of ')

def refine_variant(marker):
    return codes[marker] + GLUE + '"pass" and "refine".'

def redraft_variant(marker):
    return codes[marker] + GLUE + '"pass", "refine", and "redraft".'

def needle(marker):
    return f'print("{marker}")'

rules = []
def rule(response, needle=None, times=None):
    r = {"kind": "rule", "response": response}
    if needle is not None:
        r["needle"] = needle
    if times is not None:
        r["times"] = times
    rules.append(r)

# --- regeneration rules: keyed on the current critique marker; within each
# chain the later step comes first because its prompt carries earlier critiques
rule(gen(codes["C2"]), "CRIT_C_R2")
rule(gen(codes["C1"]), "CRIT_C_R1")
rule(gen(codes["C4"]), "CRIT_C_REDRAFT")
rule(gen(codes["D2"]), "CRIT_D_R2")
rule(gen(codes["D1"]), "CRIT_D_R1")
rule(gen(codes["D5"]), "CRIT_D_REDRAFT")
rule(gen(codes["D4"]), "CRIT_D_RD1")
rule(gen(codes["B1"]), "CRIT_B_REFINE")
rule(gen(codes["E1"]), "CRIT_E_R1")

# --- feedback rules: keyed on the code under review; the refine-strategy pass
# happens first, so times-limited rules peel off the self_refine behavior
rule(fb("pass", "Correct."), needle("A0"))
rule(fb("pass", "Correct."), needle("A1"))
rule(fb("refine", "Needs work. CRIT_B_REFINE"), needle("B0"))
rule(fb("pass", "Correct."), needle("B1"))
rule(fb("refine", "Small fix. CRIT_C_R1"), refine_variant("C0"))
rule(fb("redraft", "Wrong approach entirely. CRIT_C_REDRAFT"), redraft_variant("C0"))
rule(fb("refine", "Still off. CRIT_C_R2"), needle("C1"))
rule(fb("pass", "Looks correct now."), needle("C2"))
rule(fb("pass", "Correct."), needle("C4"))
rule(fb("pass", "Correct."), needle("Calt"))
rule(fb("refine", "Small fix. CRIT_D_R1"), refine_variant("D0"))
rule(fb("refine", "Tweak this first. CRIT_D_RD1"), redraft_variant("D0"))
rule(fb("refine", "Still off. CRIT_D_R2"), needle("D1"))
rule(fb("pass", "Looks correct now."), needle("D2"))
rule(fb("redraft", "Dead end, start over. CRIT_D_REDRAFT"), needle("D4"))
rule(fb("pass", "Correct."), needle("D5"))
rule(fb("refine", "Polish it. CRIT_E_R1"), refine_variant("E0"))
rule(fb("pass", "Correct."), redraft_variant("E0"))
rule(fb("pass", "Correct."), needle("E1"))

# --- generation rules for the 4-sample pools; counts sum to exactly 4 per task
rule(gen(codes["A0"]), "alpha", times=2)
rule(gen(codes["A1"]), "alpha", times=2)
rule(gen(codes["B0"]), "bravo", times=4)
rule(gen(codes["C0"]), "charlie", times=2)
rule(gen(codes["Calt"]), "charlie", times=1)
rule(gen(codes["C0"]), "charlie", times=1)
rule(gen(codes["D0"]), "delta", times=4)
rule(gen(codes["E0"]), "echo", times=4)

with open(f"{FIX}/generator.jsonl", "w") as f:
    for r in rules:
        f.write(json.dumps(r) + "\n")

def annot(action):
    return f"<suggestion>{action}</suggestion>"

good = [
    {"kind": "rule", "needle": "new approach", "response": annot("redraft")},
    {"kind": "default", "response": annot("refine")},
]
flip = [
    {"kind": "rule", "needle": needle("C4"), "response": annot("refine")},
    {"kind": "rule", "needle": "new approach", "response": annot("redraft")},
    {"kind": "default", "response": annot("refine")},
]
with open(f"{FIX}/aux_good.jsonl", "w") as f:
    for r in good:
        f.write(json.dumps(r) + "\n")
with open(f"{FIX}/aux_flip.jsonl", "w") as f:
    for r in flip:
        f.write(json.dumps(r) + "\n")

with open(f"{FIX}/checker.sh", "w") as f:
    f.write("#!/bin/sh\n# exit 0 when the solution carries the RIGHT marker\ngrep -q RIGHT \"$2\" && exit 0\nexit 1\n")
os.chmod(f"{FIX}/checker.sh", 0o755)
print("ok")
