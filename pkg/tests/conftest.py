import pytest

from protek import OrderedTree, make_builtin


def catalan(n: int) -> int:
    """Independent Catalan oracle via the convolution recurrence."""
    cs = [1]
    for m in range(n):
        cs.append(sum(cs[i] * cs[m - i] for i in range(m + 1)))
    return cs[n]


def leaf() -> OrderedTree:
    return OrderedTree()


def path_tree(n: int) -> OrderedTree:
    t = leaf()
    for _ in range(n - 1):
        t = OrderedTree([t])
    return t


def complete_binary_tree(depth: int) -> OrderedTree:
    if depth == 0:
        return leaf()
    child = complete_binary_tree(depth - 1)
    return OrderedTree([child, complete_binary_tree(depth - 1)])


def tree_height(t: OrderedTree) -> int:
    if not t.children:
        return 0
    return 1 + max(tree_height(c) for c in t.children)


@pytest.fixture(scope="session")
def plane():
    return make_builtin("plane")


@pytest.fixture(scope="session")
def cayley():
    return make_builtin("cayley")


@pytest.fixture(scope="session")
def riordan():
    return make_builtin("riordan")


@pytest.fixture(scope="session")
def complete_binary():
    return make_builtin("complete-binary")


@pytest.fixture(scope="session")
def pruned_binary():
    return make_builtin("pruned-binary")
