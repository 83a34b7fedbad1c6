#!/usr/bin/env python3
# Regenerates the golden conversation and its three provider scripts.
# Run from this directory; the outputs are committed.
import json
import re

SEED = 1
USERS = {"Caroline": "golden:Caroline", "Melanie": "golden:Melanie"}

# (caroline line, melanie line, caroline facts, melanie facts)
# a fact is a string (ADD), ("update", target fact, new text), ("delete", target fact) or ("noop", text)
SESSIONS = [
    ("2023-05-08T13:00:00Z", [
        ("I just started a pottery class at the community center.", "Nice, I have been painting landscapes lately.",
         ["Started a pottery class at the community center"], ["Paints landscapes"]),
        ("I live in San Francisco near the bay.", "I adopted a puppy named Biscuit.",
         ["Lives in San Francisco"], ["Adopted a puppy named Biscuit"]),
        ("My sister gave me a shell necklace from Hawaii.", "That is lovely.",
         ["Got a shell necklace from her sister"], []),
        ("I am vegetarian these days.", "I love pepperoni pizza.",
         ["Is vegetarian"], ["Loves pepperoni pizza"]),
    ]),
    ("2023-06-10T09:30:00Z", [
        ("I moved to New York last week.", "Big change! Biscuit turned one.",
         [("update", "Lives in San Francisco", "Moved to New York in June 2023", "Lives in New York since June 2023")],
         ["Biscuit turned one year old"]),
        ("I went to a support group on Saturday.", "Proud of you.",
         ["Went to a support group on 10 June 2023"], []),
        ("I stopped the pottery class.", "I sold my first painting.",
         [("delete", "Started a pottery class at the community center", "Stopped the pottery class")],
         ["Sold her first painting"]),
        ("Running is my new hobby.", "I might join you.",
         ["Took up running"], [("noop", "Might join Caroline running")]),
    ]),
    ("2023-07-15T18:45:00Z", [
        ("I ran a 10k race in July.", "I cannot eat pizza anymore, doctor's orders.",
         ["Ran a 10k race in July 2023"],
         [("update", "Loves pepperoni pizza", "Stopped eating pizza", "Stopped eating pizza on doctor's orders")]),
        ("I am still vegetarian.", "Biscuit learned to fetch.",
         [("noop", "Is vegetarian")], ["Biscuit learned to fetch"]),
        ("Thinking of adopting a cat.", "Cats are great.",
         ["Is thinking of adopting a cat"], []),
        ("Bye for now!", "See you soon.", [], []),
    ]),
]

# (question, gold, category, scripted answer, judge label)
QUESTIONS = [
    ("Where does Caroline live now?", "New York", "single_hop", "New York", "CORRECT"),
    ("What did Caroline get from her sister?", "A shell necklace", "single_hop", "a necklace", "CORRECT"),
    ("What is the name of Melanie's puppy?", "Biscuit", "single_hop", "Biscuit", "CORRECT"),
    ("When did Caroline run a 10k race?", "July 2023", "temporal", "July 2023", "CORRECT"),
    ("When did Caroline move to New York?", "June 2023", "temporal", "May 2023", "WRONG"),
    ("What does Melanie like to paint?", "Landscapes", "open_domain", "landscapes", "CORRECT"),
    ("Which class did Caroline drop?", "Pottery", "multi_hop", "the pottery class", "CORRECT"),
    ("What diet does Caroline follow?", "Vegetarian", "single_hop", "vegan", "WRONG"),
    ("Why did Melanie stop eating pizza?", "Doctor's orders", "open_domain", "Doctor's orders", "CORRECT"),
    ("What pet is Caroline considering?", "A cat", "multi_hop", "a dog", "WRONG"),
]
ADVERSARIAL = ("What instrument does Caroline play?", "n/a", "adversarial")


def minute(start, n):
    hh, mm = int(start[11:13]), int(start[14:16])
    total = hh * 60 + mm + n
    return f"{start[:11]}{total // 60:02d}:{total % 60:02d}:00Z"


def memory_id(n):
    return f"{SEED:08x}-0000-4000-8000-{n:012x}"


def shown_text(fact):
    # the text the extractor reports for a scripted fact
    if isinstance(fact, str):
        return fact
    return fact[2] if fact[0] in ("update", "delete") else fact[1]


def escape(text):
    return re.sub(r"([.^$*+?()\[\]{}|\\])", r"\\\1", text)


def tool(name, **arguments):
    return {"tool_calls": [{"name": name, "arguments": arguments}]}


def main():
    sessions, extract, update = [], [], []
    ids, counter = {}, 0
    for index, (start, pairs) in enumerate(SESSIONS):
        messages = []
        for p, (c_line, m_line, c_facts, m_facts) in enumerate(pairs):
            c_ts, m_ts = minute(start, 2 * p), minute(start, 2 * p + 1)
            messages.append({"speaker": "Caroline", "text": c_line, "timestamp": c_ts})
            messages.append({"speaker": "Melanie", "text": m_line, "timestamp": m_ts})
            # namespaces are visited in name order, facts in list order
            for speaker, facts in (("Caroline", c_facts), ("Melanie", m_facts)):
                ns = USERS[speaker]
                if facts:
                    texts = [shown_text(f) for f in facts]
                    extract.append({
                        "match": {"contains": ["purpose: extract_facts", f'user "{ns}"'],
                                  "regex": "## New exchange\\n.*\\n.*" + escape(m_line)},
                        "response": {"text": json.dumps({"facts": texts})},
                    })
                for fact in facts:
                    shown = shown_text(fact)
                    if isinstance(fact, str):
                        counter += 1
                        ids[(ns, fact)] = memory_id(counter)
                        response = tool("ADD", text=fact)
                    elif fact[0] == "update":
                        response = tool("UPDATE", id=ids[(ns, fact[1])], text=fact[3])
                    elif fact[0] == "delete":
                        response = tool("DELETE", id=ids[(ns, fact[1])])
                    else:
                        response = tool("NOOP")
                    update.append({
                        "match": {"contains": ["purpose: update_memory", f'user "{ns}"',
                                               f"## Candidate fact\n{shown}\n"], "times": 1},
                        "response": response,
                    })
        sessions.append({"timestamp": start, "messages": messages})

    ingest_script = {"strict": True, "entries": extract + update + [
        {"match": "purpose: extract_facts", "response": {"text": json.dumps({"facts": []})}},
        {"match": "purpose: summarize",
         "response": {"text": "Caroline and Melanie catch up about hobbies, homes, food and pets."}},
    ]}
    qa = [{"question": q, "answer": gold, "category": category} for q, gold, category, _, _ in QUESTIONS]
    qa.insert(5, {"question": ADVERSARIAL[0], "answer": ADVERSARIAL[1], "category": ADVERSARIAL[2]})
    dataset = {"conversations": [{"id": "golden", "speakers": ["Caroline", "Melanie"],
                                  "sessions": sessions, "qa": qa}]}
    answer_script = {"strict": True, "entries": [
        {"match": {"contains": ["purpose: answer", f"Question: {q}\n"]}, "response": {"text": answer}}
        for q, _, _, answer, _ in QUESTIONS]}
    judge_script = {"strict": True, "entries": [
        {"match": {"contains": ["purpose: judge", f"Question: {q}\n"]},
         "response": {"text": json.dumps({"label": label})}}
        for q, _, _, _, label in QUESTIONS]}

    for name, value in (("dataset.json", dataset), ("ingest_script.json", ingest_script),
                        ("answer_script.json", answer_script), ("judge_script.json", judge_script)):
        with open(name, "w") as out:
            json.dump(value, out, indent=2)
            out.write("\n")


if __name__ == "__main__":
    main()
