"""The worked example used across the suite: a five-hole program over a
5x5 grid, its known-good fills, and a train grid that exercises them."""

DARC_ANPL = '''def main(input):
    centers = "traverse the input which is a 2-dim numpy array, return positions which satisfies that there is no grey in its 3*3 neighbor"(input)
    scores = "for each position in the centers, count the yellow position in its 3*3 neighbor"(input, centers)
    center_yellow, center_black = "return the center with the max scores and other centers"(centers, scores)
    output = "for each position in the position list, make its 3*3 neighbor yellow"(input, center_yellow)
    output = "for each position in the position list, make its 3*3 neighbor black"(output, center_black)
    return output
'''

# needle (description prefix) -> markdown completion, one per hole
DARC_FILLS = {
    "traverse the input which is": '''Here is the implementation:
```python
def find_positions_without_grey_neighbors(input: np.ndarray) -> List[Tuple[int, int]]:
    positions = []
    for i in range(1, input.shape[0]-1):
        for j in range(1, input.shape[1]-1):
            if np.all(input[i-1:i+2, j-1:j+2] != grey):
                positions.append((i, j))
    return positions
```''',
    "count the yellow position": '''```python
def count_yellow_neighbors(input: np.ndarray, centers: List[Tuple[int, int]]) -> np.ndarray:
    scores = np.zeros(len(centers))
    for i, position in enumerate(centers):
        scores[i] = np.sum(input[position[0] - 1:position[0] + 2, position[1] - 1:position[1] + 2] == yellow)
    return scores
```''',
    "return the center with the max scores": '''```python
def get_max_score_center(centers: List[Tuple[int, int]], scores: np.ndarray) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int]]]:
    max_score = np.max(scores)
    max_centers = [centers[i] for i in range(len(centers)) if scores[i] == max_score]
    other_centers = [centers[i] for i in range(len(centers)) if scores[i] < max_score]
    return (max_centers, other_centers)
```''',
    "make its 3*3 neighbor yellow": '''```python
def make_neighbors_yellow(input: np.ndarray, positions: List[Tuple[int, int]]) -> np.ndarray:
    for position in positions:
        input[position[0]-1:position[0]+2, position[1]-1:position[1]+2] = yellow
    return input
```''',
    "make its 3*3 neighbor black": '''```python
def make_neighbors_black(input: np.ndarray, positions: List[Tuple[int, int]]) -> np.ndarray:
    for position in positions:
        input[position[0] - 1:position[0] + 2, position[1] - 1:position[1] + 2] = black
    return input
```''',
}

# yellow at (1,1), grey at (2,4); interior cells near the grey are excluded
DARC_TRAIN_INPUT = [
    [0, 0, 0, 0, 0],
    [0, 4, 0, 0, 0],
    [0, 0, 0, 0, 5],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
]

# centers (1,1),(1,2),(2,1),(2,2) score 1 and turn yellow; (3,1),(3,2) black
DARC_TRAIN_OUTPUT = [
    [4, 4, 4, 4, 0],
    [4, 4, 4, 4, 0],
    [0, 0, 0, 0, 5],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
]

DARC_CENTERS = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]
DARC_SCORES = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0]

DARC_TASK = {
    "train": [{"input": DARC_TRAIN_INPUT, "output": DARC_TRAIN_OUTPUT}],
    "test": [{"input": DARC_TRAIN_INPUT, "output": DARC_TRAIN_OUTPUT}],
}
