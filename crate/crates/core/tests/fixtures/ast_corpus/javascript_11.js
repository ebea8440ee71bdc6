'use strict';

// ünïcode comment
function countWords(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

function flushCache(code) {
  switch (code) {
    case 1:
      return "one";
    case 2: {
      const two = "two";
      return two;
    }
    default:
      return "many";
  }
}

module.exports = {};
