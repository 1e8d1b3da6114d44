"""Golden agent-dialogue fixtures shared across parser, runtime and eval tests."""

from __future__ import annotations

# First generation round of the city-retrieval episode (everything the model
# emits before the backend stops at "Observation:").
CITY_ASK_SEGMENT = """Task: Find the user's city within the United Kingdom and store it as a string.
Thought: I need to ask the user for his city.
Action:
```
{
"action": "ask_user",
"action_input": "Which city in the United Kingdom do you live in?"
}
```
"""

# Second round: the store call, leading space before the key as generated.
CITY_STORE_SEGMENT = """Thought: I need to store this parameter.
Action:
```
{
"action": "store",
 "action_input": "Oxford"
}
```
"""

CITY_FINAL_SEGMENT = """Thought: I have found the user's city and stored it.
Final Answer: The user lives in Oxford.
"""

CITY_USER_ANSWER = "I live in Oxford on Banbury Rd."

# The episode as one flat transcript, observations included.
CITY_FULL_TRANSCRIPT = (
    CITY_ASK_SEGMENT
    + "Observation: I live in Oxford on Banbury Rd.\n"
    + CITY_STORE_SEGMENT
    + "Observation: The value was correctly assigned. The task is done\n"
    + CITY_FINAL_SEGMENT
)

MALFORMED_BLOBS = [
    "I think the city is Oxford, no tools needed.\n",
    'Action:\n```\n{"action": "store"\n```\n',
    'Action:\n```\n{"action": "store"}\n```\n',
    'Action:\n```\n{"action_input": 2}\n```\n',
    'Action:\n```\n{"action": "ask_user", "action_input": "Hi?"}\n```\n'
    'Action:\n```\n{"action": "store", "action_input": 1}\n```\n',
    'Action:\n```\n{"action": "fly", "action_input": 1}\n```\n',
    'Action:\n```\n{"action": "store", "action_input": {"city": "Oxford"}}\n```\n',
    'Action:\n```\n{"action": "store", "action_input": null}\n```\n',
    'Action:\n```\n{"action": "store", "action_input": true}\n```\n',
    'Action:\n```\n[{"action": "store", "action_input": 1}]\n```\n',
    'Action:\n```\n{"action": 3, "action_input": 1}\n```\n',
    "Action: blah { not json at all }\n",
]
