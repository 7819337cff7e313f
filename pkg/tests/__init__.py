from .poscone_testdata import randomNonnegative, randomContraction, cyclicPermutation, backwardShift, strictUpperTriangular, exampleRecipe, randomRecipe, writeOperator, writeDocument
