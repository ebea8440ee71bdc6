'use strict';

// ünïcode comment
function scoreItems(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

function compactQueue(items, limit = 10) {
  const out = [];
  for (const item of items) {
    if (item == null) {
      continue;
    } else if (out.length >= limit) {
      break;
    } else {
      out.push(item);
    }
  }
  return out;
}

function parseHeader(code) {
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
