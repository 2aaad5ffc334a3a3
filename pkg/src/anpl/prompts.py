"""Prompt template assets for hole compilation.

These strings are part of the system's external behavior: tests pin them
bit-exactly, so any change must bump PROMPT_VERSION.
"""

PROMPT_VERSION = 1

SYSTEM_PROMPT = (
    "As a pythonGPT, your task is to complete the unimplemented functions "
    "in the given python code,\n"
    'which are referred to as "holes" and are labeled as _hole0, _hole1, '
    "_hole2, and so on.\n"
    "Your implementation should align with the code and documentation "
    "using Python."
)

USER_TEMPLATE = (
    "```python\n"
    "{code}\n"
    "```\n"
    "The function needs to be given a new name. "
    "Markdown format should be used to return it.\n"
    "```python\n"
    "{hole}\n"
    "```"
)


def render_user_prompt(code: str, hole_stub: str) -> str:
    return USER_TEMPLATE.format(code=code, hole=hole_stub)
